#include "ffratpg/netlist.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <ostream>
#include <queue>
#include <sstream>

namespace ffratpg {

namespace {

constexpr std::array<std::string_view, kGateKindCount> kKindNames = {
    "AND", "NAND", "OR", "NOR", "NOT", "BUFF", "XOR", "XNOR", "INPUT", "DFF"};

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

void check_arity(GateKind kind, std::size_t arity, const std::string& name) {
  bool ok = false;
  switch (kind) {
    case GateKind::Input: ok = arity == 0; break;
    case GateKind::Not:
    case GateKind::Buf:
    case GateKind::Dff: ok = arity == 1; break;
    default: ok = arity >= 2; break;
  }
  if (!ok) {
    throw NetlistError("gate '" + name + "' of kind " + std::string(to_string(kind)) +
                       " has invalid arity " + std::to_string(arity));
  }
}

}  // namespace

std::string_view to_string(GateKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<GateKind> gate_kind_from_keyword(std::string_view keyword) {
  const std::string key = upper(keyword);
  if (key == "BUF") return GateKind::Buf;
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == key) return static_cast<GateKind>(i);
  }
  return std::nullopt;
}

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
            message),
      line_(line),
      column_(column) {}

std::optional<GateId> Netlist::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<GateId> Netlist::dead_gates() const {
  std::vector<GateId> out;
  for (GateId id = 0; id < dead_.size(); ++id) {
    if (dead_[id]) out.push_back(id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Builder

NetlistBuilder::NetlistBuilder(std::string name) : name_(std::move(name)) {}

GateId NetlistBuilder::declare(const std::string& name) {
  auto [it, inserted] = index_.emplace(name, static_cast<GateId>(names_.size()));
  if (inserted) {
    names_.push_back(name);
    pending_.push_back({GateKind::Input, {}, false});
  }
  return it->second;
}

GateId NetlistBuilder::add_input(const std::string& name) {
  GateId id = declare(name);
  if (pending_[id].defined) throw NetlistError("duplicate definition of '" + name + "'");
  pending_[id] = {GateKind::Input, {}, true};
  inputs_.push_back(id);
  return id;
}

GateId NetlistBuilder::add_gate(const std::string& name, GateKind kind,
                                std::vector<std::string> fanins) {
  if (kind == GateKind::Input) return add_input(name);
  GateId id = declare(name);
  if (pending_[id].defined) throw NetlistError("duplicate definition of '" + name + "'");
  check_arity(kind, fanins.size(), name);
  for (const auto& fin : fanins) declare(fin);
  pending_[id] = {kind, std::move(fanins), true};
  return id;
}

void NetlistBuilder::mark_output(const std::string& name) {
  declare(name);
  if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end()) {
    outputs_.push_back(name);
  }
}

Netlist NetlistBuilder::build() {
  Netlist n;
  n.name_ = name_;

  // Ids: inputs first in declaration order, then everything else in first-seen order.
  for (const auto& name : names_) {
    if (!pending_[index_.at(name)].defined) {
      throw NetlistError("undefined signal '" + name + "'");
    }
  }

  std::vector<GateId> remap(names_.size());
  std::vector<GateId> order;
  order.reserve(names_.size());
  for (GateId id : inputs_) order.push_back(id);
  for (GateId id = 0; id < names_.size(); ++id) {
    if (pending_[id].kind != GateKind::Input) order.push_back(id);
  }
  for (GateId i = 0; i < order.size(); ++i) remap[order[i]] = i;

  n.gates_.resize(order.size());
  n.names_.resize(order.size());
  for (GateId i = 0; i < order.size(); ++i) {
    const Pending& p = pending_[order[i]];
    Gate& g = n.gates_[i];
    g.id = i;
    g.kind = p.kind;
    n.names_[i] = names_[order[i]];
    for (const auto& fin : p.fanins) g.fanins.push_back(remap[index_.at(fin)]);
  }
  for (GateId i = 0; i < n.names_.size(); ++i) n.index_.emplace(n.names_[i], i);

  for (GateId id : inputs_) n.primary_inputs_.push_back(remap[id]);
  n.true_inputs_ = n.primary_inputs_.size();
  for (const auto& out : outputs_) {
    GateId id = remap[index_.at(out)];
    n.gates_[id].is_po = true;
    n.primary_outputs_.push_back(id);
  }
  n.true_outputs_ = n.primary_outputs_.size();

  // Full scan: DFF output becomes a pseudo-PI, DFF data input a pseudo-PO.
  for (Gate& g : n.gates_) {
    if (g.kind != GateKind::Dff) continue;
    const GateId d = g.fanins.front();
    n.scan_cells_.push_back({g.id, d});
    g.kind = GateKind::Input;
    g.fanins.clear();
    n.primary_inputs_.push_back(g.id);
  }
  for (const ScanCell& cell : n.scan_cells_) {
    if (!n.gates_[cell.d].is_po) {
      n.gates_[cell.d].is_po = true;
      n.primary_outputs_.push_back(cell.d);
    }
  }

  for (Gate& g : n.gates_) {
    for (GateId f : g.fanins) n.gates_[f].fanouts.push_back(g.id);
  }
  return levelize(std::move(n));
}

// ---------------------------------------------------------------------------
// Levelization

Netlist levelize(Netlist n) {
  const std::size_t count = n.gates_.size();
  std::vector<std::size_t> pending(count);
  std::vector<GateId> ready;
  for (const Gate& g : n.gates_) {
    pending[g.id] = g.fanins.size();
    if (g.fanins.empty()) ready.push_back(g.id);
  }

  std::vector<GateId> order;
  order.reserve(count);
  while (!ready.empty()) {
    GateId id = ready.back();
    ready.pop_back();
    order.push_back(id);
    Gate& g = n.gates_[id];
    g.level = 0;
    for (GateId f : g.fanins) g.level = std::max(g.level, n.gates_[f].level + 1);
    for (GateId out : g.fanouts) {
      if (--pending[out] == 0) ready.push_back(out);
    }
  }
  if (order.size() != count) {
    for (GateId id = 0; id < count; ++id) {
      if (pending[id] != 0) {
        throw NetlistError("combinational cycle through '" + n.names_[id] + "'");
      }
    }
  }

  std::stable_sort(order.begin(), order.end(), [&](GateId a, GateId b) {
    const int la = n.gates_[a].level, lb = n.gates_[b].level;
    return la != lb ? la < lb : a < b;
  });
  n.topo_order_ = std::move(order);
  n.max_level_ = 0;
  for (const Gate& g : n.gates_) n.max_level_ = std::max(n.max_level_, g.level);

  n.dead_.assign(count, 1);
  for (auto it = n.topo_order_.rbegin(); it != n.topo_order_.rend(); ++it) {
    const Gate& g = n.gates_[*it];
    if (g.is_po) {
      n.dead_[g.id] = 0;
      continue;
    }
    for (GateId out : g.fanouts) {
      if (!n.dead_[out]) {
        n.dead_[g.id] = 0;
        break;
      }
    }
  }
  return n;
}

// ---------------------------------------------------------------------------
// Bench reader

namespace {

struct Token {
  std::string text;
  std::size_t column;
};

class LineScanner {
 public:
  LineScanner(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

  void skip_space() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= line_.size();
  }
  bool peek(char c) {
    skip_space();
    return pos_ < line_.size() && line_[pos_] == c;
  }
  void expect(char c) {
    skip_space();
    if (pos_ >= line_.size() || line_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }
  Token identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < line_.size()) {
      const char c = line_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',' ||
          c == '=') {
        break;
      }
      ++pos_;
    }
    if (pos_ == start) fail("expected identifier");
    return {std::string(line_.substr(start, pos_ - start)), start + 1};
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_no_, pos_ + 1);
  }
  std::size_t column() const { return pos_ + 1; }

 private:
  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

struct Position {
  std::size_t line;
  std::size_t column;
};

}  // namespace

Netlist parse_bench(std::string_view text, std::string name) {
  NetlistBuilder builder(std::move(name));
  std::unordered_map<std::string, Position> defined;
  std::unordered_map<std::string, Position> first_use;
  std::vector<std::pair<std::string, Position>> outputs;

  auto use = [&](const Token& t, std::size_t line) {
    first_use.try_emplace(t.text, Position{line, t.column});
  };
  auto define = [&](const Token& t, std::size_t line) {
    auto [it, inserted] = defined.try_emplace(t.text, Position{line, t.column});
    if (!inserted) {
      throw ParseError("duplicate definition of '" + t.text + "' (first defined on line " +
                           std::to_string(it->second.line) + ")",
                       line, t.column);
    }
  };

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    LineScanner scan(line, line_no);
    if (scan.at_end()) {
      if (end == text.size()) break;
      continue;
    }

    Token head = scan.identifier();
    const std::string keyword = upper(head.text);
    if (scan.peek('(') && (keyword == "INPUT" || keyword == "OUTPUT")) {
      scan.expect('(');
      Token sig = scan.identifier();
      scan.expect(')');
      if (!scan.at_end()) scan.fail("unexpected trailing text");
      if (keyword == "INPUT") {
        define(sig, line_no);
        builder.add_input(sig.text);
      } else {
        use(sig, line_no);
        outputs.emplace_back(sig.text, Position{line_no, sig.column});
      }
    } else {
      scan.expect('=');
      Token kind_tok = scan.identifier();
      auto kind = gate_kind_from_keyword(kind_tok.text);
      if (!kind || *kind == GateKind::Input) {
        throw ParseError("unknown gate type '" + kind_tok.text + "'", line_no, kind_tok.column);
      }
      scan.expect('(');
      std::vector<std::string> fanins;
      if (!scan.peek(')')) {
        while (true) {
          Token f = scan.identifier();
          use(f, line_no);
          fanins.push_back(f.text);
          if (scan.peek(',')) {
            scan.expect(',');
            continue;
          }
          break;
        }
      }
      scan.expect(')');
      if (!scan.at_end()) scan.fail("unexpected trailing text");
      define(head, line_no);
      try {
        builder.add_gate(head.text, *kind, std::move(fanins));
      } catch (const NetlistError& e) {
        throw ParseError(e.what(), line_no, head.column);
      }
    }
    if (end == text.size()) break;
  }

  // Report the earliest undefined use so the message does not depend on hash order.
  const std::pair<const std::string, Position>* missing = nullptr;
  for (const auto& entry : first_use) {
    if (defined.count(entry.first)) continue;
    const Position& p = entry.second;
    if (!missing || p.line < missing->second.line ||
        (p.line == missing->second.line && p.column < missing->second.column)) {
      missing = &entry;
    }
  }
  if (missing) {
    throw ParseError("undefined signal '" + missing->first + "'", missing->second.line,
                     missing->second.column);
  }
  for (const auto& [sig, pos] : outputs) builder.mark_output(sig);
  return builder.build();
}

Netlist read_bench_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open bench file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (auto dot = stem.rfind('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return parse_bench(buffer.str(), stem);
}

// ---------------------------------------------------------------------------
// Bench writer

void emit_bench(const Netlist& n, std::ostream& out) {
  out << "# " << n.name() << "\n";
  std::vector<std::uint8_t> scan_q(n.size(), 0);
  std::vector<GateId> dff_input(n.size(), 0);
  for (const ScanCell& c : n.scan_cells()) {
    scan_q[c.q] = 1;
    dff_input[c.q] = c.d;
  }
  for (std::size_t i = 0; i < n.true_input_count(); ++i) {
    out << "INPUT(" << n.gate_name(n.primary_inputs()[i]) << ")\n";
  }
  for (std::size_t i = 0; i < n.true_output_count(); ++i) {
    out << "OUTPUT(" << n.gate_name(n.primary_outputs()[i]) << ")\n";
  }
  for (const Gate& g : n.gates()) {
    if (scan_q[g.id]) {
      out << n.gate_name(g.id) << " = DFF(" << n.gate_name(dff_input[g.id]) << ")\n";
      continue;
    }
    if (g.kind == GateKind::Input) continue;
    out << n.gate_name(g.id) << " = " << to_string(g.kind) << "(";
    for (std::size_t i = 0; i < g.fanins.size(); ++i) {
      if (i) out << ", ";
      out << n.gate_name(g.fanins[i]);
    }
    out << ")\n";
  }
}

std::string emit_bench(const Netlist& n) {
  std::ostringstream out;
  emit_bench(n, out);
  return out.str();
}

}  // namespace ffratpg
