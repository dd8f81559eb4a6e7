#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace coordterm {

struct ClassEntry {
  std::string qualified_name;  // dot-separated, `$` for nesting
  std::string label;           // last dot segment
  std::string package;         // qualified name minus label
  enum class Kind { Class, Interface } kind = Kind::Class;
  std::optional<std::string> superclass;  // resolved qualified name
  std::vector<std::string> interfaces;    // resolved qualified names
  bool external = false;  // referenced but not defined in the parsed tree

  bool operator==(const ClassEntry&) const = default;
};

// Per-class usage-slot counts, keyed `ARG-<method>` / `API-<method>`.
using ContextCounts = std::map<std::string, long long>;

struct CodeFacts {
  std::map<std::string, ClassEntry> classes;      // by qualified name
  std::map<std::string, ContextCounts> contexts;  // defined classes only

  const ClassEntry* find(const std::string& qualified) const;
  bool operator==(const CodeFacts&) const = default;
};

enum class TaxonomyKind { Package, Type };

// Parses every `.java` file under `root`. Files that fail to parse are
// reported on `diagnostics` and skipped; the batch never aborts on them.
CodeFacts parse_source_tree(const std::filesystem::path& root,
                            std::ostream* diagnostics = nullptr);

// Same pipeline over in-memory (name, content) sources; test entry point.
CodeFacts parse_java_sources(
    const std::vector<std::pair<std::string, std::string>>& named_sources,
    std::ostream* diagnostics = nullptr);

// Nodes reachable by 1..n upward steps. Package taxonomy: the chain of
// enclosing packages, the class's own package being level 1. Type taxonomy:
// the superclass/interface DAG. Unknown class -> std::invalid_argument.
std::set<std::string> ancestors_within(const CodeFacts& facts, const std::string& qualified,
                                       TaxonomyKind kind, int n);

// Throws std::runtime_error if the superclass/interface edges contain a cycle.
void check_type_acyclic(const CodeFacts& facts);

std::string label_of(const std::string& qualified);
std::string package_of(const std::string& qualified);

std::string facts_to_json(const CodeFacts& facts, const std::string* config_echo = nullptr);
CodeFacts facts_from_json(const std::string& text);
void save_facts(const CodeFacts& facts, const std::string& path,
                const std::string* config_echo = nullptr);
CodeFacts load_facts(const std::string& path);

}  // namespace coordterm
