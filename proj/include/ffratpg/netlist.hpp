#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ffratpg {

using GateId = std::uint32_t;

enum class GateKind : std::uint8_t { And, Nand, Or, Nor, Not, Buf, Xor, Xnor, Input, Dff };

inline constexpr std::size_t kGateKindCount = 10;

std::string_view to_string(GateKind kind);
std::optional<GateKind> gate_kind_from_keyword(std::string_view keyword);

/// True for kinds whose output is the complement of the underlying AND/OR/XOR/BUF function.
constexpr bool is_inverting(GateKind kind) {
  return kind == GateKind::Nand || kind == GateKind::Nor || kind == GateKind::Not ||
         kind == GateKind::Xnor;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed bench text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Structural problem in an otherwise well-formed netlist (cycle, bad arity).
class NetlistError : public Error {
 public:
  using Error::Error;
};

struct Gate {
  GateId id = 0;
  GateKind kind = GateKind::Input;
  std::vector<GateId> fanins;
  std::vector<GateId> fanouts;
  int level = 0;
  bool is_po = false;
};

/// A DFF split by the full-scan transformation: `q` became a pseudo-PI, `d` a pseudo-PO.
struct ScanCell {
  GateId q;
  GateId d;
};

/// Levelized, index-based gate graph. Immutable once built; share freely across threads.
class Netlist {
 public:
  Netlist() = default;

  const std::string& name() const { return name_; }
  std::size_t size() const { return gates_.size(); }
  const Gate& gate(GateId id) const { return gates_[id]; }
  std::span<const Gate> gates() const { return gates_; }

  /// True PIs in declaration order, followed by scan pseudo-PIs.
  std::span<const GateId> primary_inputs() const { return primary_inputs_; }
  /// True POs in declaration order, followed by scan pseudo-POs that are not already POs.
  std::span<const GateId> primary_outputs() const { return primary_outputs_; }
  std::span<const ScanCell> scan_cells() const { return scan_cells_; }
  std::size_t true_input_count() const { return true_inputs_; }
  std::size_t true_output_count() const { return true_outputs_; }

  /// Stable order, ascending by (level, id).
  std::span<const GateId> topological_order() const { return topo_order_; }
  int max_level() const { return max_level_; }

  const std::string& gate_name(GateId id) const { return names_[id]; }
  std::optional<GateId> find(std::string_view name) const;

  /// Gates from which no PO is reachable. Kept in the graph, reported here.
  bool is_dead(GateId id) const { return dead_[id] != 0; }
  std::vector<GateId> dead_gates() const;

  bool is_input(GateId id) const { return gates_[id].kind == GateKind::Input; }

 private:
  friend class NetlistBuilder;
  friend Netlist levelize(Netlist netlist);

  std::string name_;
  std::vector<Gate> gates_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, GateId> index_;
  std::vector<GateId> primary_inputs_;
  std::vector<GateId> primary_outputs_;
  std::vector<ScanCell> scan_cells_;
  std::size_t true_inputs_ = 0;
  std::size_t true_outputs_ = 0;
  std::vector<GateId> topo_order_;
  std::vector<std::uint8_t> dead_;
  int max_level_ = 0;
};

/// Programmatic construction; `build()` validates, applies scan, levelizes.
class NetlistBuilder {
 public:
  explicit NetlistBuilder(std::string name = {});

  GateId add_input(const std::string& name);
  GateId add_gate(const std::string& name, GateKind kind, std::vector<std::string> fanins);
  void mark_output(const std::string& name);

  Netlist build();

 private:
  GateId declare(const std::string& name);

  struct Pending {
    GateKind kind;
    std::vector<std::string> fanins;
    bool defined = false;
  };

  std::string name_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, GateId> index_;
  std::vector<Pending> pending_;
  std::vector<std::string> outputs_;
  std::vector<GateId> inputs_;
};

/// Parses ISCAS-89 bench text. DFFs are split by full-scan transformation.
Netlist parse_bench(std::string_view text, std::string name = {});
Netlist read_bench_file(const std::string& path);

/// Recomputes levels, topological order and dead-logic flags. Throws NetlistError on a cycle.
Netlist levelize(Netlist netlist);

/// Writes bench text that reparses to an isomorphic netlist (scan cells are emitted as DFFs).
void emit_bench(const Netlist& netlist, std::ostream& out);
std::string emit_bench(const Netlist& netlist);

}  // namespace ffratpg
