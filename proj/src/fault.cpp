#include "ffratpg/fault.hpp"

#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace ffratpg {

GateId fault_net(const Netlist& netlist, const FaultSite& fault) {
  return fault.is_output() ? fault.gate : netlist.gate(fault.gate).fanins[*fault.pin];
}

void validate_fault(const Netlist& netlist, const FaultSite& fault) {
  if (fault.gate >= netlist.size()) {
    throw Error("fault gate id " + std::to_string(fault.gate) + " out of range");
  }
  if (netlist.is_input(fault.gate)) {
    throw Error("faults sit on cell pins; '" + netlist.gate_name(fault.gate) +
                "' is a primary input");
  }
  if (fault.pin && *fault.pin >= netlist.gate(fault.gate).fanins.size()) {
    throw Error("fault pin IN:" + std::to_string(*fault.pin) + " out of range for gate '" +
                netlist.gate_name(fault.gate) + "'");
  }
}

std::vector<FaultSite> enumerate_faults(const Netlist& netlist) {
  std::vector<FaultSite> faults;
  for (const Gate& g : netlist.gates()) {
    if (g.kind == GateKind::Input) continue;
    faults.push_back({g.id, std::nullopt, false});
    faults.push_back({g.id, std::nullopt, true});
    for (std::uint32_t k = 0; k < g.fanins.size(); ++k) {
      faults.push_back({g.id, k, false});
      faults.push_back({g.id, k, true});
    }
  }
  return faults;
}

namespace {

struct FaultKey {
  GateId gate;
  std::int64_t pin;  // -1 for output
  bool stuck;
  bool operator==(const FaultKey&) const = default;
};

struct FaultKeyHash {
  std::size_t operator()(const FaultKey& k) const {
    return (static_cast<std::size_t>(k.gate) * 1315423911u) ^
           (static_cast<std::size_t>(k.pin + 1) << 1) ^ static_cast<std::size_t>(k.stuck);
  }
};

FaultKey key_of(const FaultSite& f) {
  return {f.gate, f.pin ? static_cast<std::int64_t>(*f.pin) : -1, f.stuck_at};
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<FaultSite> collapse_faults(const Netlist& netlist,
                                       const std::vector<FaultSite>& faults) {
  std::unordered_map<FaultKey, std::size_t, FaultKeyHash> index;
  for (std::size_t i = 0; i < faults.size(); ++i) index.emplace(key_of(faults[i]), i);
  UnionFind uf(faults.size());
  auto join = [&](const FaultKey& a, const FaultKey& b) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia != index.end() && ib != index.end()) uf.unite(ia->second, ib->second);
  };

  for (const Gate& g : netlist.gates()) {
    if (g.kind == GateKind::Input) continue;
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(g.fanins.size()); ++k) {
      // Gate-level equivalences: controlling input value ~ forced output value.
      switch (g.kind) {
        case GateKind::And: join({g.id, k, false}, {g.id, -1, false}); break;
        case GateKind::Nand: join({g.id, k, false}, {g.id, -1, true}); break;
        case GateKind::Or: join({g.id, k, true}, {g.id, -1, true}); break;
        case GateKind::Nor: join({g.id, k, true}, {g.id, -1, false}); break;
        case GateKind::Not:
          join({g.id, k, false}, {g.id, -1, true});
          join({g.id, k, true}, {g.id, -1, false});
          break;
        case GateKind::Buf:
          join({g.id, k, false}, {g.id, -1, false});
          join({g.id, k, true}, {g.id, -1, true});
          break;
        default: break;
      }
      // A fanout-free driver's output is the same line as this pin.
      const Gate& driver = netlist.gate(g.fanins[k]);
      if (driver.kind != GateKind::Input && driver.fanouts.size() == 1 && !driver.is_po) {
        join({g.id, k, false}, {driver.id, -1, false});
        join({g.id, k, true}, {driver.id, -1, true});
      }
    }
  }

  std::vector<FaultSite> out;
  for (std::size_t i = 0; i < faults.size(); ++i) {
    if (uf.find(i) == i) out.push_back(faults[i]);
  }
  return out;
}

std::string format_fault(const Netlist& netlist, const FaultSite& fault) {
  std::string s = netlist.gate_name(fault.gate);
  s += fault.is_output() ? " OUT" : " IN:" + std::to_string(*fault.pin);
  s += fault.stuck_at ? " SA1" : " SA0";
  return s;
}

FaultSite parse_fault(const Netlist& netlist, std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string name, pin, stuck, extra;
  if (!(in >> name >> pin >> stuck) || (in >> extra)) {
    throw Error("malformed fault '" + std::string(line) + "'");
  }
  auto id = netlist.find(name);
  if (!id) throw Error("fault references unknown gate '" + name + "'");
  FaultSite f;
  f.gate = *id;
  if (pin == "OUT") {
    f.pin = std::nullopt;
  } else if (pin.rfind("IN:", 0) == 0 && pin.size() > 3) {
    try {
      std::size_t used = 0;
      const unsigned long k = std::stoul(pin.substr(3), &used);
      if (used != pin.size() - 3) throw std::invalid_argument(pin);
      f.pin = static_cast<std::uint32_t>(k);
    } catch (const std::exception&) {
      throw Error("malformed fault pin '" + pin + "'");
    }
  } else {
    throw Error("malformed fault pin '" + pin + "'");
  }
  if (stuck == "SA0") f.stuck_at = false;
  else if (stuck == "SA1") f.stuck_at = true;
  else throw Error("malformed stuck value '" + stuck + "'");
  validate_fault(netlist, f);
  return f;
}

void write_fault_list(const Netlist& netlist, const std::vector<FaultSite>& faults,
                      std::ostream& out) {
  for (const FaultSite& f : faults) out << format_fault(netlist, f) << '\n';
}

std::vector<FaultSite> read_fault_list(const Netlist& netlist, std::istream& in) {
  std::vector<FaultSite> faults;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      faults.push_back(parse_fault(netlist, line));
    } catch (const Error& e) {
      throw Error("fault list line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return faults;
}

}  // namespace ffratpg
