#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

namespace saddlemg {

using Point = std::array<double, 3>;

/// Integer coordinates are multiples of 2^-kCoordBits of the unit length.
inline constexpr int kCoordBits = 16;
inline constexpr std::uint32_t kRootLength = 1u << kCoordBits;
inline constexpr int kMaxMeshLevel = 14;

/// Leaf of the quad/octree. Side length is 2^-level; the anchor is the
/// lower-left(-front) corner in integer coordinates.
struct Element {
  int level = 0;
  std::array<std::uint32_t, 3> anchor{0, 0, 0};

  std::uint32_t int_size() const { return kRootLength >> level; }
  double size() const { return 1.0 / static_cast<double>(1u << level); }
  Point lower() const;
  Point centroid(int dim) const;

  friend bool operator==(const Element&, const Element&) = default;
};

/// Morton (Z-order) key of an anchor, used for the leaf order.
std::uint64_t morton_key(const std::array<std::uint32_t, 3>& anchor, int dim);

/// 2:1-balanced-or-not linear tree of leaves on the unit square/cube, kept
/// in Morton order. Construction sorts the leaves and validates that they
/// tile the domain.
class AdaptiveMesh {
public:
  AdaptiveMesh(int dim, std::vector<Element> leaves);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(leaves_.size()); }
  std::span<const Element> leaves() const { return leaves_; }
  const Element& leaf(int i) const { return leaves_[i]; }

  /// Index of the leaf with exactly this level and anchor.
  std::optional<int> find(int level, const std::array<std::uint32_t, 3>& anchor) const;
  /// Index of the leaf containing the integer point, -1 outside the domain.
  int leaf_containing(const std::array<std::int64_t, 3>& point) const;
  /// Leaf across face (axis, side) of leaf e whose region contains the face's
  /// lower corner; -1 on the domain boundary.
  int face_neighbor(int e, int axis, int side) const;

  int min_level() const { return min_level_; }
  int max_level() const { return max_level_; }
  double volume() const;
  /// Exhaustive check over all face-adjacent pairs.
  bool is_balanced() const;

  /// One leaf per line: `level x y [z]` with exact decimal anchors.
  void write(std::ostream& out) const;

  friend bool operator==(const AdaptiveMesh& a, const AdaptiveMesh& b) {
    return a.dim_ == b.dim_ && a.leaves_ == b.leaves_;
  }

private:
  int dim_;
  int min_level_ = 0;
  int max_level_ = 0;
  std::vector<Element> leaves_;
  std::unordered_map<std::uint64_t, int> index_;
};

AdaptiveMesh build_uniform(int dim, int level);

/// Refine an element by `extra_levels` whenever its centroid lies within
/// radius 2^d h^2 / h_base of `center`, where h is the element side and
/// h_base = 2^-base_level. Elements never exceed `max_level`.
struct BallCriterion {
  Point center{0.5, 0.5, 0.5};
  int base_level = 0;
  int max_level = kMaxMeshLevel;
  int extra_levels = 2;
};

/// Refine, down to `target_level`, every element whose closed bounding box
/// meets the open annulus inner < |x - center| < outer.
struct RingOverlapCriterion {
  Point center{0.5, 0.5, 0.5};
  double inner = 0.125;
  double outer = 0.25;
  int target_level = 0;
};

using RefinementCriterion = std::variant<BallCriterion, RingOverlapCriterion>;

bool ball_matches(const BallCriterion& c, const Element& e, int dim);
bool ring_overlaps(const RingOverlapCriterion& c, const Element& e, int dim);

/// One application of the criterion followed by balance_2to1. Returns the
/// input unchanged when nothing matches.
AdaptiveMesh refine(const AdaptiveMesh& mesh, const RefinementCriterion& criterion);

/// Subdivide leaves until every face-adjacent pair differs by at most one
/// level. Only violating leaves are split; the loop runs to a fixed point.
AdaptiveMesh balance_2to1(const AdaptiveMesh& mesh);

// ---------------------------------------------------------------------------
// Degrees of freedom

enum class BoundaryKind : std::uint8_t { Dirichlet, Neumann };

/// Boundary condition per face of the unit cube, indexed by 2*axis + side
/// (side 0 is the face at coordinate 0).
struct BoundarySpec {
  std::array<BoundaryKind, 6> faces{BoundaryKind::Dirichlet, BoundaryKind::Dirichlet,
                                    BoundaryKind::Dirichlet, BoundaryKind::Dirichlet,
                                    BoundaryKind::Dirichlet, BoundaryKind::Dirichlet};

  static BoundarySpec all_dirichlet() { return {}; }
  /// Neumann at y = 0 and y = 1, Dirichlet elsewhere.
  static BoundarySpec neumann_y();
  BoundaryKind at(int axis, int side) const { return faces[2 * axis + side]; }
};

enum class FaceStatus : std::uint8_t { InteriorRegular, InteriorHanging, BoundaryDirichlet, BoundaryNeumann };

/// Geometric face of a leaf. The normal is always the global +axis direction.
struct FaceDof {
  int axis = 0;
  int level = 0;
  Point center{};
  /// Lower side and upper side owners (-1 where absent). For a coarse face
  /// with refined neighbors the upper/lower fine owner is the child touching
  /// the face's lower corner.
  std::array<int, 2> owners{-1, -1};
  FaceStatus status = FaceStatus::InteriorRegular;
  /// Master face id for hanging faces, -1 otherwise.
  int master = -1;
  /// Free flux index of this face (or its master), -1 for Neumann faces.
  int flux_index = -1;
  /// Slot in DofMap::neumann_faces, -1 unless Neumann.
  int neumann_slot = -1;
};

/// RT0 numbering. Local face f of an element is 2*axis + side.
struct DofMap {
  int dim = 0;
  int n_u = 0;
  int n_p = 0;
  std::vector<FaceDof> faces;
  /// Geometric face id of each local face of each element.
  std::vector<std::array<int, 6>> element_faces;
  /// Resolved unknown of each local face: >= 0 free flux index,
  /// otherwise -(slot + 1) for a Neumann slot.
  std::vector<std::array<int, 6>> element_dofs;
  /// Face id for each Neumann slot.
  std::vector<int> neumann_faces;
  /// Face id carrying each free flux index.
  std::vector<int> flux_faces;

  int hanging_count() const;
};

DofMap enumerate_dofs(const AdaptiveMesh& mesh, const BoundarySpec& boundary);

}  // namespace saddlemg
