#include "bipcorr/model.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "bipcorr/errors.hpp"

namespace bipcorr {

namespace {

unsigned words_for(unsigned bits) { return (bits + 63) / 64; }

bool test_bit(std::span<const std::uint64_t> row, unsigned b) {
  return (row[b / 64] >> (b % 64)) & 1u;
}

void assign_bit(std::uint64_t* row, unsigned b, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (b % 64);
  if (value) {
    row[b / 64] |= mask;
  } else {
    row[b / 64] &= ~mask;
  }
}

}  // namespace

GraphShape::GraphShape(unsigned m, unsigned n) : m_(m), n_(n) {
  if (m < 1 || n < 1) {
    throw InvalidArgument("K_{m,n} needs m >= 1 and n >= 1 (got m=" +
                          std::to_string(m) + ", n=" + std::to_string(n) + ")");
  }
}

GraphShape build_shape(unsigned m, unsigned n) { return GraphShape(m, n); }

bool is_valid(const GraphShape& shape, const Vertex& v) noexcept {
  return v.index < shape.side_size(v.side);
}

std::string to_string(const Vertex& v) {
  return (v.side == Side::X ? "X" : "Y") + std::to_string(v.index);
}

Orientation::Orientation(GraphShape shape)
    : shape_(shape),
      y_words_(words_for(shape.n())),
      x_words_(words_for(shape.m())),
      x_out_(static_cast<std::size_t>(shape.m()) * y_words_, 0),
      y_out_(static_cast<std::size_t>(shape.n()) * x_words_, 0) {
  // Every edge starts as Y_j -> X_i.
  for (unsigned j = 0; j < shape.n(); ++j) {
    for (unsigned i = 0; i < shape.m(); ++i) {
      assign_bit(&y_out_[static_cast<std::size_t>(j) * x_words_], i, true);
    }
  }
}

Orientation::Orientation(GraphShape shape, const std::vector<bool>& flags)
    : Orientation(shape) {
  if (flags.size() != shape.edge_count()) {
    throw InvalidArgument("orientation needs exactly m*n flags");
  }
  for (unsigned i = 0; i < shape.m(); ++i) {
    for (unsigned j = 0; j < shape.n(); ++j) {
      set_flag(i, j, flags[static_cast<std::size_t>(i) * shape.n() + j]);
    }
  }
}

void Orientation::set_flag(unsigned i, unsigned j, bool x_to_y) {
  assign_bit(&x_out_[static_cast<std::size_t>(i) * y_words_], j, x_to_y);
  assign_bit(&y_out_[static_cast<std::size_t>(j) * x_words_], i, !x_to_y);
}

bool Orientation::flag(unsigned i, unsigned j) const {
  if (i >= shape_.m() || j >= shape_.n()) {
    throw InvalidArgument("edge index out of range");
  }
  return test_bit(x_out_row(i), j);
}

std::span<const std::uint64_t> Orientation::x_out_row(unsigned i) const {
  return {x_out_.data() + static_cast<std::size_t>(i) * y_words_, y_words_};
}

std::span<const std::uint64_t> Orientation::y_out_row(unsigned j) const {
  return {y_out_.data() + static_cast<std::size_t>(j) * x_words_, x_words_};
}

OrientationBuilder::OrientationBuilder(GraphShape shape) : o_(shape) {}

Orientation orientation_from_index(const GraphShape& shape, std::uint64_t index) {
  if (shape.edge_count() > 63) {
    throw InvalidArgument("index bijection supports m*n <= 63");
  }
  if (index >> shape.edge_count()) {
    throw InvalidArgument("orientation index out of range [0, 2^{mn})");
  }
  OrientationBuilder b(shape);
  for (unsigned i = 0; i < shape.m(); ++i) {
    for (unsigned j = 0; j < shape.n(); ++j) {
      b.set(i, j, (index >> (i * shape.n() + j)) & 1u);
    }
  }
  return std::move(b).build();
}

std::uint64_t orientation_index(const Orientation& o) {
  const GraphShape& s = o.shape();
  if (s.edge_count() > 63) {
    throw InvalidArgument("index bijection supports m*n <= 63");
  }
  std::uint64_t index = 0;
  for (unsigned i = 0; i < s.m(); ++i) {
    for (unsigned j = 0; j < s.n(); ++j) {
      if (o.flag(i, j)) index |= std::uint64_t{1} << (i * s.n() + j);
    }
  }
  return index;
}

namespace {

// Frontier expansion alternating sides over word-packed rows.
std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>> reach_sets(
    const Orientation& o, const Vertex& u) {
  const GraphShape& s = o.shape();
  const unsigned xw = words_for(s.m());
  const unsigned yw = words_for(s.n());
  std::vector<std::uint64_t> rx(xw, 0), ry(yw, 0), fx(xw, 0), fy(yw, 0);
  if (u.side == Side::X) {
    assign_bit(rx.data(), u.index, true);
    assign_bit(fx.data(), u.index, true);
  } else {
    assign_bit(ry.data(), u.index, true);
    assign_bit(fy.data(), u.index, true);
  }
  std::vector<std::uint64_t> nx(xw), ny(yw);
  auto any = [](const std::vector<std::uint64_t>& v) {
    return std::any_of(v.begin(), v.end(), [](std::uint64_t w) { return w != 0; });
  };
  while (any(fx) || any(fy)) {
    std::fill(nx.begin(), nx.end(), 0);
    std::fill(ny.begin(), ny.end(), 0);
    for (unsigned w = 0; w < xw; ++w) {
      for (std::uint64_t bits = fx[w]; bits; bits &= bits - 1) {
        const auto row = o.x_out_row(w * 64 + std::countr_zero(bits));
        for (unsigned k = 0; k < yw; ++k) ny[k] |= row[k];
      }
    }
    for (unsigned w = 0; w < yw; ++w) {
      for (std::uint64_t bits = fy[w]; bits; bits &= bits - 1) {
        const auto row = o.y_out_row(w * 64 + std::countr_zero(bits));
        for (unsigned k = 0; k < xw; ++k) nx[k] |= row[k];
      }
    }
    for (unsigned k = 0; k < xw; ++k) {
      nx[k] &= ~rx[k];
      rx[k] |= nx[k];
    }
    for (unsigned k = 0; k < yw; ++k) {
      ny[k] &= ~ry[k];
      ry[k] |= ny[k];
    }
    fx.swap(nx);
    fy.swap(ny);
  }
  return {std::move(rx), std::move(ry)};
}

void require_vertex(const GraphShape& shape, const Vertex& v) {
  if (!is_valid(shape, v)) {
    throw InvalidArgument("vertex " + to_string(v) + " is not in K_{" +
                          std::to_string(shape.m()) + "," +
                          std::to_string(shape.n()) + "}");
  }
}

}  // namespace

bool reaches(const Orientation& o, const Vertex& u, const Vertex& v) {
  require_vertex(o.shape(), u);
  require_vertex(o.shape(), v);
  if (u == v) return true;
  const auto [rx, ry] = reach_sets(o, u);
  return test_bit(v.side == Side::X ? std::span<const std::uint64_t>(rx)
                                    : std::span<const std::uint64_t>(ry),
                  v.index);
}

std::vector<Vertex> neighborhood(const Orientation& o, const Vertex& v,
                                 Direction direction) {
  require_vertex(o.shape(), v);
  const GraphShape& s = o.shape();
  std::vector<Vertex> out;
  if (v.side == Side::X) {
    for (unsigned j = 0; j < s.n(); ++j) {
      if (o.flag(v.index, j) == (direction == Direction::Out)) {
        out.push_back(y_vertex(j));
      }
    }
  } else {
    for (unsigned i = 0; i < s.m(); ++i) {
      if (o.flag(i, v.index) == (direction == Direction::In)) {
        out.push_back(x_vertex(i));
      }
    }
  }
  return out;
}

Orientation reverse(const Orientation& o) {
  OrientationBuilder b(o.shape());
  for (unsigned i = 0; i < o.shape().m(); ++i) {
    for (unsigned j = 0; j < o.shape().n(); ++j) {
      b.set(i, j, !o.flag(i, j));
    }
  }
  return std::move(b).build();
}

AvoidanceEvent::AvoidanceEvent(const GraphShape& shape, std::vector<Atom> atoms)
    : atoms_(std::move(atoms)) {
  if (atoms_.empty()) {
    throw InvalidArgument("an avoidance event needs at least one atom");
  }
  for (const Atom& a : atoms_) {
    require_vertex(shape, a.source);
    require_vertex(shape, a.target);
    if (a.source == a.target) {
      throw InvalidArgument("atom endpoints must differ: " + bipcorr::to_string(a.source));
    }
  }
  std::vector<Atom> sorted = atoms_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("repeated atom in avoidance event");
  }
}

AvoidanceEvent AvoidanceEvent::with_atom(const GraphShape& shape, Atom extra) const {
  std::vector<Atom> atoms = atoms_;
  atoms.push_back(extra);
  return AvoidanceEvent(shape, std::move(atoms));
}

std::string AvoidanceEvent::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (k) os << ", ";
    os << bipcorr::to_string(atoms_[k].source) << "-/->"
       << bipcorr::to_string(atoms_[k].target);
  }
  os << '}';
  return os.str();
}

bool event_holds(const Orientation& o, const AvoidanceEvent& e) {
  for (const Atom& a : e.atoms()) {
    if (reaches(o, a.source, a.target)) return false;
  }
  return true;
}

Placement canonical_placement(PlacementKind kind) {
  switch (kind) {
    case PlacementKind::AllInX:
      return {kind, x_vertex(0), x_vertex(1), x_vertex(2)};
    case PlacementKind::XXY:
      return {kind, x_vertex(0), x_vertex(1), y_vertex(0)};
    case PlacementKind::XYX:
      return {kind, x_vertex(0), y_vertex(0), x_vertex(1)};
  }
  throw InvalidArgument("unknown placement kind");
}

bool placement_fits(const GraphShape& shape, PlacementKind kind) noexcept {
  return kind == PlacementKind::AllInX ? shape.m() >= 3 : shape.m() >= 2;
}

std::string_view placement_name(PlacementKind kind) {
  switch (kind) {
    case PlacementKind::AllInX:
      return "all-x";
    case PlacementKind::XXY:
      return "xxy";
    case PlacementKind::XYX:
      return "xyx";
  }
  return "?";
}

std::optional<PlacementKind> parse_placement(std::string_view name) {
  for (PlacementKind k : kAllPlacements) {
    if (placement_name(k) == name) return k;
  }
  return std::nullopt;
}

PlacementEvents placement_events(const GraphShape& shape, PlacementKind kind) {
  if (!placement_fits(shape, kind)) {
    throw InvalidArgument("placement " + std::string(placement_name(kind)) +
                          " does not fit K_{" + std::to_string(shape.m()) + "," +
                          std::to_string(shape.n()) + "}");
  }
  const Placement p = canonical_placement(kind);
  const Atom a{p.x, p.y};
  const Atom b{p.y, p.z};
  return {AvoidanceEvent(shape, {a}), AvoidanceEvent(shape, {b}),
          AvoidanceEvent(shape, {a, b})};
}

std::string_view beta_class_name(BetaClass c) {
  switch (c) {
    case BetaClass::LessThanOne:
      return "beta<1";
    case BetaClass::EqualOne:
      return "beta=1";
    case BetaClass::GreaterThanOne:
      return "beta>1";
  }
  return "?";
}

}  // namespace bipcorr
