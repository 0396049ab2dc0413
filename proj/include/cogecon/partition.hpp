#pragma once

// State-space partitions. A Voronoi representation is a set of prototype
// states; each point belongs to its nearest prototype's cell, and cells may be
// merged into compound regions that share one primary prototype. Box and
// half-plane partitions exist so fixed baseline geometries can be tested on the
// same footing.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "cogecon/error.hpp"
#include "cogecon/puck.hpp"

namespace cogecon {

struct RegionId {
  std::int64_t value = -1;

  friend auto operator<=>(const RegionId&, const RegionId&) = default;
};

inline std::ostream& operator<<(std::ostream& os, RegionId r) { return os << r.value; }

}  // namespace cogecon

template <>
struct std::hash<cogecon::RegionId> {
  std::size_t operator()(cogecon::RegionId r) const noexcept {
    return std::hash<std::int64_t>{}(r.value);
  }
};

namespace cogecon {

using PrototypeId = std::int64_t;

struct Prototype {
  PrototypeId id = 0;
  State point;
  std::optional<PrototypeId> merged_into;  // absent: this prototype is primary

  bool primary() const { return !merged_into.has_value(); }
  PrototypeId primary_id() const { return merged_into.value_or(id); }
  RegionId region() const { return {primary_id()}; }

  friend bool operator==(const Prototype&, const Prototype&) = default;
};

// Per-dimension multipliers applied before taking Euclidean distance.
struct Scale {
  double x = 1.0 / 4.8;
  double v = 1.0 / 11.0;

  static Scale unit() { return {1.0, 1.0}; }
  friend bool operator==(const Scale&, const Scale&) = default;
};

struct Box {
  double x_lo = 0, x_hi = 0, v_lo = 0, v_hi = 0;

  double area() const { return (x_hi - x_lo) * (v_hi - v_lo); }
  friend bool operator==(const Box&, const Box&) = default;
};

enum class RepKind { Voronoi, Boxes, Halfplane };

inline const char* name(RepKind k) {
  switch (k) {
    case RepKind::Voronoi: return "voronoi";
    case RepKind::Boxes: return "boxes";
    case RepKind::Halfplane: return "halfplane";
  }
  return "?";
}

struct NearestPrototypes {
  Prototype primary;                // primary prototype of the region s falls in
  std::optional<Prototype> nearest;  // nearest prototype, when it is not the primary
};

namespace detail {

struct VoronoiData {
  Scale scale;
  std::vector<Prototype> protos;  // ascending id
  std::unordered_map<PrototypeId, std::size_t> index;
  PrototypeId next_id = 0;
};

// Tiling of a rectangle by boxes, with an x-slab index for O(log n) lookup.
struct BoxData {
  std::vector<Box> boxes;
  Bounds hull;
  std::vector<double> xs;                                     // slab edges
  std::vector<std::vector<std::pair<double, std::size_t>>> slabs;  // (v_lo, box) sorted

  void build_index() {
    xs.clear();
    for (const Box& b : boxes) {
      xs.push_back(b.x_lo);
      xs.push_back(b.x_hi);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    slabs.assign(xs.size() - 1, {});
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
      const double mid = 0.5 * (xs[k] + xs[k + 1]);
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (boxes[i].x_lo <= mid && mid < boxes[i].x_hi) slabs[k].emplace_back(boxes[i].v_lo, i);
      }
      std::sort(slabs[k].begin(), slabs[k].end());
    }
  }

  std::size_t locate(const State& s0) const {
    const State s = hull.clamp(s0);
    auto it = std::upper_bound(xs.begin(), xs.end(), s.x);
    std::size_t k = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    k = std::min(k, slabs.size() - 1);
    const auto& slab = slabs[k];
    auto jt = std::upper_bound(slab.begin(), slab.end(), std::make_pair(s.v, std::numeric_limits<std::size_t>::max()));
    std::size_t j = jt == slab.begin() ? 0 : static_cast<std::size_t>(jt - slab.begin()) - 1;
    return slab[j].second;
  }
};

struct HalfplaneData {
  double slope = 1.7615;  // dividing line v = -slope * x
};

inline void validate_boxes(const std::vector<Box>& boxes) {
  if (boxes.empty()) throw InvalidConfig("box partition has no boxes");
  Bounds hull{boxes[0].x_lo, boxes[0].x_hi, boxes[0].v_lo, boxes[0].v_hi};
  double area = 0.0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const Box& b = boxes[i];
    if (!(std::isfinite(b.x_lo) && std::isfinite(b.x_hi) && std::isfinite(b.v_lo) && std::isfinite(b.v_hi)))
      throw InvalidConfig("box " + std::to_string(i) + " has non-finite bounds");
    if (!(b.x_lo < b.x_hi && b.v_lo < b.v_hi))
      throw InvalidConfig("box " + std::to_string(i) + " is empty or inverted");
    hull.x_lo = std::min(hull.x_lo, b.x_lo);
    hull.x_hi = std::max(hull.x_hi, b.x_hi);
    hull.v_lo = std::min(hull.v_lo, b.v_lo);
    hull.v_hi = std::max(hull.v_hi, b.v_hi);
    area += b.area();
  }
  const double hull_area = hull.width() * hull.height();
  const double tol = 1e-9 * hull_area;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      const double w = std::min(boxes[i].x_hi, boxes[j].x_hi) - std::max(boxes[i].x_lo, boxes[j].x_lo);
      const double h = std::min(boxes[i].v_hi, boxes[j].v_hi) - std::max(boxes[i].v_lo, boxes[j].v_lo);
      if (w > 0 && h > 0 && w * h > tol)
        throw InvalidConfig("boxes " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    }
  }
  if (std::abs(area - hull_area) > tol) throw InvalidConfig("boxes do not cover their bounding rectangle");
}

}  // namespace detail

class Representation {
 public:
  // An empty Voronoi representation.
  Representation() : data_(detail::VoronoiData{}) {}

  static Representation voronoi(Scale scale = {}) {
    if (!(scale.x > 0 && scale.v > 0)) throw InvalidConfig("distance scale must be strictly positive");
    Representation r;
    std::get<detail::VoronoiData>(r.data_).scale = scale;
    return r;
  }

  static Representation boxes(std::vector<Box> boxes) {
    detail::validate_boxes(boxes);
    detail::BoxData d;
    d.boxes = std::move(boxes);
    d.hull = {d.boxes[0].x_lo, d.boxes[0].x_hi, d.boxes[0].v_lo, d.boxes[0].v_hi};
    for (const Box& b : d.boxes) {
      d.hull.x_lo = std::min(d.hull.x_lo, b.x_lo);
      d.hull.x_hi = std::max(d.hull.x_hi, b.x_hi);
      d.hull.v_lo = std::min(d.hull.v_lo, b.v_lo);
      d.hull.v_hi = std::max(d.hull.v_hi, b.v_hi);
    }
    d.build_index();
    Representation r;
    r.data_ = std::move(d);
    return r;
  }

  static Representation halfplane(double slope) {
    if (!std::isfinite(slope)) throw InvalidConfig("half-plane slope must be finite");
    Representation r;
    r.data_ = detail::HalfplaneData{slope};
    return r;
  }

  RepKind kind() const { return static_cast<RepKind>(data_.index()); }

  bool empty() const { return region_count() == 0; }

  std::size_t region_count() const {
    switch (kind()) {
      case RepKind::Voronoi: {
        const auto& p = vor().protos;
        return static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [](const Prototype& q) { return q.primary(); }));
      }
      case RepKind::Boxes: return std::get<detail::BoxData>(data_).boxes.size();
      case RepKind::Halfplane: return 2;
    }
    return 0;
  }

  std::vector<RegionId> regions() const {
    std::vector<RegionId> out;
    switch (kind()) {
      case RepKind::Voronoi:
        for (const Prototype& p : vor().protos)
          if (p.primary()) out.push_back(p.region());
        break;
      case RepKind::Boxes:
        for (std::size_t i = 0; i < box_list().size(); ++i) out.push_back({static_cast<std::int64_t>(i)});
        break;
      case RepKind::Halfplane: out = {{0}, {1}}; break;
    }
    return out;
  }

  RegionId classify(const State& s) const {
    switch (kind()) {
      case RepKind::Voronoi: return nearest(s).region();
      case RepKind::Boxes: return {static_cast<std::int64_t>(std::get<detail::BoxData>(data_).locate(s))};
      case RepKind::Halfplane: {
        // region 1 lies on or above the line v = -slope x
        const double slope = std::get<detail::HalfplaneData>(data_).slope;
        return {s.v + slope * s.x >= 0.0 ? 1 : 0};
      }
    }
    return {};
  }

  // --- Voronoi -----------------------------------------------------------

  const std::vector<Prototype>& prototypes() const { return vor().protos; }
  Scale scale() const { return vor().scale; }

  double distance2(const State& a, const State& b) const {
    const Scale sc = vor().scale;
    const double dx = (a.x - b.x) * sc.x, dv = (a.v - b.v) * sc.v;
    return dx * dx + dv * dv;
  }

  // Nearest prototype; ties go to the lowest id.
  const Prototype& nearest(const State& s) const {
    const auto& d = vor();
    if (d.protos.empty()) throw EmptyRepresentation();
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.protos.size(); ++i) {
      const double dd = distance2(s, d.protos[i].point);
      if (dd < best_d) {
        best_d = dd;
        best = i;
      }
    }
    return d.protos[best];
  }

  const Prototype& prototype(PrototypeId id) const {
    const auto& d = vor();
    auto it = d.index.find(id);
    if (it == d.index.end()) throw ContractViolation("no prototype with id " + std::to_string(id));
    return d.protos[it->second];
  }

  bool has_prototype(PrototypeId id) const { return vor().index.contains(id); }

  bool has_point(const State& s) const {
    const auto& p = vor().protos;
    return std::any_of(p.begin(), p.end(), [&](const Prototype& q) { return q.point == s; });
  }

  NearestPrototypes nearest_and_primary(const State& s) const {
    const Prototype& n = nearest(s);
    if (n.primary()) return {n, std::nullopt};
    return {prototype(*n.merged_into), n};
  }

  // Inserts s as a new primary prototype. A point that is already a prototype
  // leaves the representation untouched and throws DuplicatePrototype.
  RegionId add_prototype(const State& s) {
    if (!finite(s)) throw ContractViolation("prototype must be finite");
    if (has_point(s)) throw DuplicatePrototype("state is already a prototype");
    auto& d = vor_mut();
    return insert_prototype({d.next_id, s, std::nullopt});
  }

  // Folds every prototype of region b into region a.
  void merge(RegionId a, RegionId b) {
    if (a == b) throw ContractViolation("cannot merge a region into itself");
    if (!prototype(a.value).primary() || !prototype(b.value).primary())
      throw ContractViolation("merge needs two primary prototypes");
    for (Prototype& p : vor_mut().protos)
      if (p.primary_id() == b.value) p.merged_into = a.value;
  }

  void detach(PrototypeId id) {
    auto& d = vor_mut();
    auto it = d.index.find(id);
    if (it == d.index.end()) throw ContractViolation("no prototype with id " + std::to_string(id));
    Prototype& p = d.protos[it->second];
    if (p.primary()) throw ContractViolation("cannot detach a primary prototype");
    p.merged_into.reset();
  }

  // Adds a prototype with a caller-chosen id and merge link (loaders).
  RegionId insert_prototype(Prototype p) {
    auto& d = vor_mut();
    if (d.index.contains(p.id)) throw ContractViolation("duplicate prototype id " + std::to_string(p.id));
    d.index[p.id] = d.protos.size();
    d.next_id = std::max(d.next_id, p.id + 1);
    const RegionId r = p.region();
    d.protos.push_back(p);
    if (d.protos.size() > 1 && d.protos[d.protos.size() - 2].id > p.id) {
      std::sort(d.protos.begin(), d.protos.end(), [](const Prototype& l, const Prototype& r2) { return l.id < r2.id; });
      for (std::size_t i = 0; i < d.protos.size(); ++i) d.index[d.protos[i].id] = i;
    }
    return r;
  }

  // --- Boxes / half-plane ------------------------------------------------

  const std::vector<Box>& box_list() const {
    if (kind() != RepKind::Boxes) throw WrongKind("not a box partition");
    return std::get<detail::BoxData>(data_).boxes;
  }

  double slope() const {
    if (kind() != RepKind::Halfplane) throw WrongKind("not a half-plane partition");
    return std::get<detail::HalfplaneData>(data_).slope;
  }

 private:
  const detail::VoronoiData& vor() const {
    if (kind() != RepKind::Voronoi) throw WrongKind("operation needs a Voronoi representation");
    return std::get<detail::VoronoiData>(data_);
  }
  detail::VoronoiData& vor_mut() {
    if (kind() != RepKind::Voronoi) throw WrongKind("operation needs a Voronoi representation");
    return std::get<detail::VoronoiData>(data_);
  }

  std::variant<detail::VoronoiData, detail::BoxData, detail::HalfplaneData> data_;
};

// --- Baseline constructors ------------------------------------------------

inline Representation diagonal_split(double slope = 1.7615) { return Representation::halfplane(slope); }

inline Representation uniform_grid(int nx = 10, int nv = 10, const Bounds& b = {}) {
  if (nx < 1 || nv < 1) throw InvalidConfig("grid needs at least one cell per dimension");
  auto edge = [](double lo, double hi, int i, int n) { return i == n ? hi : lo + (hi - lo) * i / n; };
  std::vector<Box> boxes;
  boxes.reserve(static_cast<std::size_t>(nx) * nv);
  for (int iv = 0; iv < nv; ++iv)
    for (int ix = 0; ix < nx; ++ix)
      boxes.push_back({edge(b.x_lo, b.x_hi, ix, nx), edge(b.x_lo, b.x_hi, ix + 1, nx),
                       edge(b.v_lo, b.v_hi, iv, nv), edge(b.v_lo, b.v_hi, iv + 1, nv)});
  return Representation::boxes(std::move(boxes));
}

// --- Text interchange -----------------------------------------------------
//
//   voronoi | boxes | halfplane      header
//   scale <sx> <sv>                  optional, voronoi only
//   <id> <x> <v> [<merged_into>]     voronoi record
//   <x_lo> <x_hi> <v_lo> <v_hi>      box record
//   <slope>                          half-plane record
//
// '#' starts a comment; blank lines are ignored.

inline void save(const Representation& rep, std::ostream& os) {
  os << name(rep.kind()) << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  switch (rep.kind()) {
    case RepKind::Voronoi:
      os << "scale " << rep.scale().x << ' ' << rep.scale().v << '\n';
      for (const Prototype& p : rep.prototypes()) {
        os << p.id << ' ' << p.point.x << ' ' << p.point.v;
        if (p.merged_into) os << ' ' << *p.merged_into;
        os << '\n';
      }
      break;
    case RepKind::Boxes:
      for (const Box& b : rep.box_list()) os << b.x_lo << ' ' << b.x_hi << ' ' << b.v_lo << ' ' << b.v_hi << '\n';
      break;
    case RepKind::Halfplane: os << rep.slope() << '\n'; break;
  }
}

inline Representation load(std::istream& is) {
  std::string raw;
  std::size_t lineno = 0;
  std::optional<RepKind> kind;
  Scale scale;
  std::vector<Prototype> protos;
  std::vector<Box> boxes;
  std::optional<double> slope;
  std::size_t header_line = 0;

  auto fields_of = [](const std::string& line) {
    std::vector<std::string> f;
    std::istringstream ss(line);
    for (std::string w; ss >> w;) f.push_back(w);
    return f;
  };
  auto number = [&lineno](const std::string& w) {
    std::size_t used = 0;
    double d = 0;
    try {
      d = std::stod(w, &used);
    } catch (const std::exception&) {
      throw ParseError(lineno, "expected a number, got '" + w + "'");
    }
    if (used != w.size() || !std::isfinite(d)) throw ParseError(lineno, "expected a number, got '" + w + "'");
    return d;
  };
  auto integer = [&lineno](const std::string& w) {
    std::size_t used = 0;
    long long n = 0;
    try {
      n = std::stoll(w, &used);
    } catch (const std::exception&) {
      throw ParseError(lineno, "expected an integer id, got '" + w + "'");
    }
    if (used != w.size()) throw ParseError(lineno, "expected an integer id, got '" + w + "'");
    return static_cast<std::int64_t>(n);
  };

  while (std::getline(is, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto f = fields_of(raw);
    if (f.empty()) continue;
    if (!kind) {
      if (f.size() != 1) throw ParseError(lineno, "expected header voronoi|boxes|halfplane");
      if (f[0] == "voronoi") kind = RepKind::Voronoi;
      else if (f[0] == "boxes") kind = RepKind::Boxes;
      else if (f[0] == "halfplane") kind = RepKind::Halfplane;
      else throw ParseError(lineno, "unknown representation kind '" + f[0] + "'");
      header_line = lineno;
      continue;
    }
    switch (*kind) {
      case RepKind::Voronoi:
        if (f[0] == "scale") {
          if (f.size() != 3) throw ParseError(lineno, "scale needs two factors");
          scale = {number(f[1]), number(f[2])};
          if (!(scale.x > 0 && scale.v > 0)) throw ParseError(lineno, "scale factors must be positive");
        } else {
          if (f.size() != 3 && f.size() != 4) throw ParseError(lineno, "voronoi record is 'id x v [merged_into]'");
          Prototype p{integer(f[0]), {number(f[1]), number(f[2])}, std::nullopt};
          if (f.size() == 4) p.merged_into = integer(f[3]);
          protos.push_back(p);
        }
        break;
      case RepKind::Boxes:
        if (f.size() != 4) throw ParseError(lineno, "box record is 'x_lo x_hi v_lo v_hi'");
        boxes.push_back({number(f[0]), number(f[1]), number(f[2]), number(f[3])});
        break;
      case RepKind::Halfplane:
        if (f.size() != 1 || slope) throw ParseError(lineno, "half-plane takes exactly one slope record");
        slope = number(f[0]);
        break;
    }
  }
  if (!kind) throw ParseError(lineno, "missing header");

  switch (*kind) {
    case RepKind::Voronoi: {
      Representation rep = Representation::voronoi(scale);
      std::unordered_map<PrototypeId, const Prototype*> by_id;
      for (const Prototype& p : protos) {
        if (!by_id.emplace(p.id, &p).second) throw ParseError(header_line, "duplicate prototype id " + std::to_string(p.id));
      }
      for (const Prototype& p : protos) {
        if (!p.merged_into) continue;
        auto it = by_id.find(*p.merged_into);
        if (it == by_id.end() || !it->second->primary() || *p.merged_into == p.id)
          throw ParseError(header_line, "prototype " + std::to_string(p.id) + " is merged into a non-primary or missing prototype");
      }
      for (const Prototype& p : protos) {
        if (rep.has_point(p.point)) throw ParseError(header_line, "duplicate prototype point for id " + std::to_string(p.id));
        rep.insert_prototype(p);
      }
      return rep;
    }
    case RepKind::Boxes:
      try {
        return Representation::boxes(std::move(boxes));
      } catch (const InvalidConfig& e) {
        throw ParseError(header_line, e.what());
      }
    case RepKind::Halfplane:
      if (!slope) throw ParseError(lineno, "half-plane file has no slope");
      return Representation::halfplane(*slope);
  }
  throw ParseError(lineno, "unreachable");
}

inline void save_file(const Representation& rep, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  save(rep, os);
  if (!os) throw Error("error writing " + path);
}

inline Representation load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open representation file " + path);
  try {
    return load(is);
  } catch (const ParseError& e) {
    throw ParseError(path, e.line(), e.detail());
  }
}

}  // namespace cogecon
