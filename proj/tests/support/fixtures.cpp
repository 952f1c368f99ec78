#include "fixtures.hpp"

#include <cstdlib>
#include <map>
#include <set>
#include <stdexcept>

#include "forge/source/tokens.hpp"

namespace forge::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "forge-test-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string sample_generation_reply() {
  return R"(Here is the package.

### FILE: mypkg/__init__.py
```
"""mypkg: tools for loading data."""
from .data_loader import load
```
### FILE: mypkg/main.py
```
from mypkg.data_loader import load


def main(path):
    """Load a file and print its rows."""
    rows = load(path)
    for row in rows:
        print(row)
    return len(rows)
```
### FILE: mypkg/data_loader.py
```
import csv


def load(path, delimiter=","):
    """Read a CSV file into a list of rows."""
    with open(path) as handle:
        reader = csv.reader(handle, delimiter=delimiter)
        return [row for row in reader]
```
### FILE: setup.py
```
from setuptools import setup, find_packages

setup(
    name="mypkg",
    version="0.1.0",
    description="Data loading tools",
    keywords=["data", "csv"],
    packages=find_packages(),
)
```
### FILE: README.md
```
# mypkg

Small helpers for loading CSV data into Python lists.

## Usage

Call `mypkg.data_loader.load` with a path.
```
### FILE: requirements.txt
```
```
### FILE: tests/test_mypkg.py
```
from mypkg.data_loader import load


def test_load(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("a,b\n1,2\n")
    assert load(str(p)) == [["a", "b"], ["1", "2"]]
```
)";
}

nlohmann::json pipeline_script(const std::string& generation_reply) {
  using nlohmann::json;
  json rules = json::array();
  rules.push_back({{"match", "Task: enhance_feature"},
                   {"response", "Reads delimited text files into rows.\n\n```\nopen file\nfor each line: split\n```\n"}});
  rules.push_back({{"match", "Task: judge_description"},
                   {"responses",
                    {"```json\n{\"specificity\": 6, \"completeness\": 7, \"technical_accuracy\": 8}\n```",
                     "```json\n{\"specificity\": 8, \"completeness\": 8, \"technical_accuracy\": 8}\n```",
                     "```json\n{\"specificity\": 7, \"completeness\": 7, \"technical_accuracy\": 7}\n```"}}});
  rules.push_back({{"match", "Task: rewrite_description"},
                   {"response", "A package that loads CSV data into Python lists of rows."}});
  rules.push_back({{"match", "Task: generate_package"}, {"response", generation_reply}});
  rules.push_back({{"match", "Task: usage_examples"},
                   {"response", "Load a file:\n\n```python\nfrom mypkg.data_loader import load\nrows = load('a.csv')\n```\n"}});
  rules.push_back({{"match", "Task: review"},
                   {"response", "Fine.\n```json\n{\"Structure\": 8, \"Code Quality\": 7, \"Testing\": 6, \"Usability\": 8, "
                                "\"Clarity\": 8, \"Completeness\": 7, \"Readability\": 9, \"Relevance\": 8, "
                                "\"Depth\": 6, \"Usefulness\": 7}\n```"}});
  return {{"rules", rules}};
}

orchestrator::EngineConfig scripted_config(const fs::path& workspace_root, const nlohmann::json& script) {
  auto c = orchestrator::default_config();
  c.provider = "scripted";
  c.script = script;
  c.workspace_root = workspace_root;
  c.retry.initial_wait = gateway::Seconds{0.001};
  c.retry.max_wait = gateway::Seconds{0.002};
  return c;
}

gateway::ModelAccess ScriptedModel::access(double temperature) const {
  gateway::ProviderProfile profile{"scripted", gateway::ProviderKind::scripted, "", "", "scripted-model"};
  gateway::RetryPolicy policy;
  policy.max_retries = 3;
  return {*gateway, profile, policy, temperature, 1024};
}

ScriptedModel scripted_model(gateway::ScriptedBehavior behavior) {
  ScriptedModel m;
  m.provider = std::make_shared<gateway::ScriptedProvider>(std::move(behavior));
  m.gateway = std::make_shared<gateway::Gateway>(
      nullptr, [](gateway::Seconds) {}, [](std::string_view) -> std::optional<std::string> { return std::nullopt; });
  m.gateway->register_scripted("scripted", m.provider);
  return m;
}

ScriptedModel scripted_model(const nlohmann::json& script) {
  return scripted_model(gateway::ScriptedProvider::behavior_from_json(script));
}

const std::vector<std::string>& python_fixtures() {
  static const std::vector<std::string> sources{
      "def add(x, y):\n    z = x + y\n    return z\n",
      "import os\n\n\ndef walk(root):\n    total = 0\n    for name in os.listdir(root):\n"
      "        if name.startswith('.'):\n            continue\n        total += 1\n    return total\n",
      "class Stack:\n    \"\"\"LIFO stack.\"\"\"\n\n    def __init__(self):\n        self.items = []\n\n"
      "    def push(self, item):\n        self.items.append(item)\n\n    def pop(self):\n"
      "        if not self.items:\n            raise IndexError('empty')\n        return self.items.pop()\n",
      "def squares(values):\n    return [v * v for v in values if v > 0]\n\n\n"
      "def table(keys):\n    return {k: len(k) for k in keys}\n",
      "import json\n\n\ndef load(path, default=None):\n    try:\n        with open(path) as fh:\n"
      "            data = json.load(fh)\n    except OSError:\n        data = default\n    return data\n",
      "def fib(n):\n    a, b = 0, 1\n    while n > 0:\n        a, b = b, a + b\n        n -= 1\n    return a\n",
      "async def fetch(client, url, retries=3):\n    for attempt in range(retries):\n"
      "        response = await client.get(url)\n        if response.ok:\n            return response\n"
      "    return None\n",
      "x = 1\ny = x * 2\nprint(x, y)\n",
  };
  return sources;
}

const std::vector<std::pair<std::string, std::string>>& codebleu_fixture_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs{
      // one renamed variable in a short function
      {"def scale(values, factor):\n    out = [v * factor for v in values]\n    return out\n",
       "def scale(values, factor):\n    result = [v * factor for v in values]\n    return result\n"},
      // scaffold stub against an implementation
      {"\"\"\"Data Loader.\"\"\"\n\n\ndef run(*args, **kwargs):\n    \"\"\"Entry point for Data Loader.\"\"\"\n"
       "    raise NotImplementedError(\"Data Loader is not implemented yet\")\n",
       "import csv\n\n\ndef run(path, delimiter=','):\n    \"\"\"Entry point for Data Loader.\"\"\"\n"
       "    with open(path) as fh:\n        return list(csv.reader(fh, delimiter=delimiter))\n"},
      // reordered statements and an extra guard
      {"def mean(xs):\n    if not xs:\n        return 0.0\n    total = sum(xs)\n    return total / len(xs)\n",
       "def mean(xs):\n    total = sum(xs)\n    count = len(xs)\n    return total / count\n"},
      // class with a changed method body
      {"class Counter:\n    def __init__(self):\n        self.n = 0\n\n    def tick(self, step=1):\n"
       "        self.n += step\n        return self.n\n",
       "class Counter:\n    def __init__(self, start=0):\n        self.n = start\n\n    def tick(self):\n"
       "        self.n = self.n + 1\n        return self.n\n"},
      // while loop against for loop
      {"def count_down(n):\n    out = []\n    while n > 0:\n        out.append(n)\n        n -= 1\n    return out\n",
       "def count_down(n):\n    out = []\n    for i in range(n, 0, -1):\n        out.append(i)\n    return out\n"},
  };
  return pairs;
}

namespace {

std::string random_segment(std::mt19937_64& rng) {
  static constexpr std::string_view chars = "abcdefghijklmnopqrstuvwxyz0123456789_";
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_int_distribution<std::size_t> pick(0, chars.size() - 1);
  std::string s;
  for (int i = len(rng); i > 0; --i) s += chars[pick(rng)];
  return s;
}

std::string random_line(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces{
      "def ", "return ", "x", " = ", "1", "(", ")", ":", "    ", "\t", "# note", "\"s\"", "é", "日本", "`", "``",
      "### FILE: a.py", "~~~", " ", "if", "-", "[", "]", "{", "}", "\\", "'"};
  std::uniform_int_distribution<int> len(0, 8);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string line;
  for (int i = len(rng); i > 0; --i) line += pieces[pick(rng)];
  if (line.starts_with("```")) line.insert(0, " ");
  if (std::bernoulli_distribution(0.1)(rng)) line += '\r';
  return line;
}

}  // namespace

PackageTree random_tree(std::mt19937_64& rng) {
  static const std::vector<std::string> exts{".py", ".md", ".txt", "", ".cfg"};
  PackageTree tree;
  std::uniform_int_distribution<int> files(1, 8);
  std::uniform_int_distribution<int> depth(1, 3);
  std::uniform_int_distribution<int> lines(0, 10);
  std::uniform_int_distribution<std::size_t> ext(0, exts.size() - 1);
  for (int f = files(rng); f > 0; --f) {
    std::string path;
    for (int d = depth(rng); d > 0; --d) {
      if (!path.empty()) path += '/';
      path += random_segment(rng);
    }
    path += exts[ext(rng)];
    std::string content;
    const int n = lines(rng);
    for (int i = 0; i < n; ++i) {
      if (i > 0) content += '\n';
      content += random_line(rng);
    }
    if (n > 0 && std::bernoulli_distribution(0.5)(rng)) content += '\n';
    tree.put(path, content);
  }
  return tree;
}

std::string random_wire_input(std::mt19937_64& rng) {
  static const std::vector<std::string> lines{
      "### FILE: pkg/a.py", "### FILE: ../escape.py", "### FILE: ", "### FILE: /abs.py", "```", "```python", "~~~",
      "print('x')",         "",                       "### FILE: pkg/a.py\r", "```\r", "text", "### FILE:pkg/b.py",
      "\xff\xfe bad",       "\xc3",                   "ok \xe2\x82",  "### FILE: dup.py"};
  std::uniform_int_distribution<int> count(0, 30);
  std::uniform_int_distribution<std::size_t> pick(0, lines.size() - 1);
  std::uniform_int_distribution<int> byte(0, 255);
  std::string out;
  for (int i = count(rng); i > 0; --i) {
    if (std::bernoulli_distribution(0.15)(rng)) {
      for (int k = 0; k < 6; ++k) out += static_cast<char>(byte(rng));
    } else {
      out += lines[pick(rng)];
    }
    if (std::bernoulli_distribution(0.9)(rng)) out += '\n';
  }
  return out;
}

std::string rename_identifiers(const std::string& src, std::mt19937_64& rng) {
  const auto stream = source::tokenize(src);
  std::map<std::string, std::string> names;
  std::set<std::string> used;
  std::uniform_int_distribution<int> digit(0, 9999);
  std::string out;
  std::size_t pos = 0;
  for (const auto& t : stream.tokens) {
    if (t.synthetic || t.kind != source::TokenKind::identifier) continue;
    auto it = names.find(t.text);
    if (it == names.end()) {
      std::string fresh;
      do {
        fresh = "r" + std::to_string(digit(rng)) + "_" + std::to_string(names.size());
      } while (!used.insert(fresh).second);
      it = names.emplace(t.text, fresh).first;
    }
    out.append(src, pos, t.offset - pos);
    out += it->second;
    pos = t.offset + t.text.size();
  }
  out.append(src, pos, std::string::npos);
  return out;
}

}  // namespace forge::testing
