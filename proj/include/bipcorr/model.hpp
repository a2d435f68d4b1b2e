#pragma once

// Complete bipartite graph K_{m,n}, its orientations, reachability and the
// non-reachability events studied throughout the toolkit.
//
// Flag convention (fixed, shared by every module and golden file):
//   flag(i, j) == true  <=>  the edge {X_i, Y_j} is directed X_i -> Y_j.
// Flags are laid out row-major, linear position i * n + j. An enumeration
// index sets flag (i, j) from bit (i * n + j).

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bipcorr {

enum class Side : std::uint8_t { X, Y };

class GraphShape {
 public:
  /// Throws InvalidArgument unless m >= 1 and n >= 1.
  GraphShape(unsigned m, unsigned n);

  unsigned m() const noexcept { return m_; }
  unsigned n() const noexcept { return n_; }
  std::uint64_t edge_count() const noexcept {
    return static_cast<std::uint64_t>(m_) * n_;
  }
  unsigned side_size(Side s) const noexcept { return s == Side::X ? m_ : n_; }
  GraphShape transposed() const { return GraphShape(n_, m_); }

  friend bool operator==(const GraphShape&, const GraphShape&) = default;

 private:
  unsigned m_;
  unsigned n_;
};

GraphShape build_shape(unsigned m, unsigned n);

struct Vertex {
  Side side = Side::X;
  unsigned index = 0;

  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

inline constexpr Vertex x_vertex(unsigned i) { return {Side::X, i}; }
inline constexpr Vertex y_vertex(unsigned j) { return {Side::Y, j}; }

bool is_valid(const GraphShape& shape, const Vertex& v) noexcept;
std::string to_string(const Vertex& v);

enum class Direction : std::uint8_t { Out, In };

/// One direction per edge of K_{m,n}. Immutable once built.
class Orientation {
 public:
  /// Builds from row-major flags; flags.size() must equal m * n.
  Orientation(GraphShape shape, const std::vector<bool>& flags);

  const GraphShape& shape() const noexcept { return shape_; }
  bool flag(unsigned i, unsigned j) const;

  /// Out-neighbourhood of X_i as a bitset over Y (ceil(n/64) words).
  std::span<const std::uint64_t> x_out_row(unsigned i) const;
  /// Out-neighbourhood of Y_j as a bitset over X (ceil(m/64) words).
  std::span<const std::uint64_t> y_out_row(unsigned j) const;

  friend bool operator==(const Orientation&, const Orientation&) = default;

 private:
  friend class OrientationBuilder;
  explicit Orientation(GraphShape shape);
  void set_flag(unsigned i, unsigned j, bool x_to_y);

  GraphShape shape_;
  unsigned y_words_;  // words per X row
  unsigned x_words_;  // words per Y row
  std::vector<std::uint64_t> x_out_;
  std::vector<std::uint64_t> y_out_;
};

/// Incremental construction, used by samplers that produce flags row by row.
class OrientationBuilder {
 public:
  explicit OrientationBuilder(GraphShape shape);
  void set(unsigned i, unsigned j, bool x_to_y) { o_.set_flag(i, j, x_to_y); }
  Orientation build() && { return std::move(o_); }

 private:
  Orientation o_;
};

/// Bijection [0, 2^{mn}) -> orientations; requires m * n <= 63.
Orientation orientation_from_index(const GraphShape& shape, std::uint64_t index);

/// Inverse of orientation_from_index.
std::uint64_t orientation_index(const Orientation& o);

/// Directed-path reachability. reaches(o, u, u) is true (empty path).
bool reaches(const Orientation& o, const Vertex& u, const Vertex& v);

/// One-step neighbours of v in the opposite class, sorted by index.
std::vector<Vertex> neighborhood(const Orientation& o, const Vertex& v,
                                 Direction direction);

/// Flips every edge. reaches(reverse(o), u, v) == reaches(o, v, u).
Orientation reverse(const Orientation& o);

struct Atom {
  Vertex source;
  Vertex target;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

/// Conjunction of atoms {source -/-> target}.
///
/// Placement events carry one or two atoms. The recursion families need
/// set-avoidance events {K -/-> a}, which is why any positive atom count is
/// accepted here.
class AvoidanceEvent {
 public:
  /// Throws InvalidArgument on an empty list, a repeated atom, an atom with
  /// equal endpoints, or a vertex outside the shape.
  AvoidanceEvent(const GraphShape& shape, std::vector<Atom> atoms);

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  AvoidanceEvent with_atom(const GraphShape& shape, Atom extra) const;
  std::string to_string() const;

 private:
  std::vector<Atom> atoms_;
};

bool event_holds(const Orientation& o, const AvoidanceEvent& e);

/// The three rows of the limit table: where x, y, z live.
enum class PlacementKind : std::uint8_t { AllInX, XXY, XYX };

inline constexpr PlacementKind kAllPlacements[] = {
    PlacementKind::AllInX, PlacementKind::XXY, PlacementKind::XYX};

struct Placement {
  PlacementKind kind;
  Vertex x;
  Vertex y;
  Vertex z;
};

/// Canonical vertices: AllInX (X0,X1,X2), XXY (X0,X1,Y0), XYX (X0,Y0,X1).
Placement canonical_placement(PlacementKind kind);
bool placement_fits(const GraphShape& shape, PlacementKind kind) noexcept;

/// CLI spelling: all-x, xxy, xyx.
std::string_view placement_name(PlacementKind kind);
std::optional<PlacementKind> parse_placement(std::string_view name);

struct PlacementEvents {
  AvoidanceEvent not_a;  // {x -/-> y}
  AvoidanceEvent not_b;  // {y -/-> z}
  AvoidanceEvent joint;  // both atoms
};

PlacementEvents placement_events(const GraphShape& shape, PlacementKind kind);

enum class BetaClass : std::uint8_t { LessThanOne, EqualOne, GreaterThanOne };

inline constexpr BetaClass kAllBetaClasses[] = {
    BetaClass::LessThanOne, BetaClass::EqualOne, BetaClass::GreaterThanOne};

std::string_view beta_class_name(BetaClass c);

}  // namespace bipcorr
