#include "saddlemg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "saddlemg/error.hpp"

namespace saddlemg {

namespace {

std::uint64_t leaf_key(int level, const std::array<std::uint32_t, 3>& anchor, int dim) {
  return (static_cast<std::uint64_t>(level) << 50) | morton_key(anchor, dim);
}

void check_dim(int dim) {
  if (dim != 2 && dim != 3) throw ArgumentError("mesh dimension must be 2 or 3");
}

std::vector<Element> children(const Element& e, int dim) {
  std::vector<Element> out;
  const std::uint32_t half = e.int_size() / 2;
  for (int c = 0; c < (1 << dim); ++c) {
    Element child{e.level + 1, e.anchor};
    for (int a = 0; a < dim; ++a)
      if (c & (1 << a)) child.anchor[a] += half;
    out.push_back(child);
  }
  return out;
}

void subdivide(const Element& e, int dim, int times, std::vector<Element>& out) {
  if (times == 0) {
    out.push_back(e);
    return;
  }
  for (const auto& c : children(e, dim)) subdivide(c, dim, times - 1, out);
}

std::string dyadic(std::uint32_t v) {
  // v / 2^16 has at most 16 fractional decimal digits; print it exactly.
  std::ostringstream s;
  s.precision(17);
  s << static_cast<double>(v) / static_cast<double>(kRootLength);
  return s.str();
}

}  // namespace

Point Element::lower() const {
  const double unit = 1.0 / static_cast<double>(kRootLength);
  return {anchor[0] * unit, anchor[1] * unit, anchor[2] * unit};
}

Point Element::centroid(int dim) const {
  Point c = lower();
  const double h = size();
  for (int a = 0; a < dim; ++a) c[a] += 0.5 * h;
  return c;
}

std::uint64_t morton_key(const std::array<std::uint32_t, 3>& anchor, int dim) {
  std::uint64_t key = 0;
  for (int b = 0; b < kCoordBits; ++b)
    for (int a = 0; a < dim; ++a)
      key |= static_cast<std::uint64_t>((anchor[a] >> b) & 1u) << (b * dim + a);
  return key;
}

AdaptiveMesh::AdaptiveMesh(int dim, std::vector<Element> leaves) : dim_(dim), leaves_(std::move(leaves)) {
  check_dim(dim);
  if (leaves_.empty()) throw ArgumentError("mesh has no leaves");
  for (const auto& e : leaves_) {
    if (e.level < 0 || e.level > kMaxMeshLevel) throw ArgumentError("leaf level out of range");
    for (int a = 0; a < 3; ++a) {
      if (a >= dim ? e.anchor[a] != 0 : (e.anchor[a] % e.int_size() != 0 || e.anchor[a] >= kRootLength))
        throw ArgumentError("leaf anchor is not aligned to its level");
    }
  }
  std::sort(leaves_.begin(), leaves_.end(), [dim](const Element& a, const Element& b) {
    return morton_key(a.anchor, dim) < morton_key(b.anchor, dim);
  });
  index_.reserve(leaves_.size() * 2);
  min_level_ = std::numeric_limits<int>::max();
  max_level_ = 0;
  std::uint64_t volume = 0;
  for (int i = 0; i < size(); ++i) {
    const auto& e = leaves_[i];
    if (!index_.emplace(leaf_key(e.level, e.anchor, dim), i).second) throw ArgumentError("duplicate leaf");
    min_level_ = std::min(min_level_, e.level);
    max_level_ = std::max(max_level_, e.level);
    volume += std::uint64_t{1} << (dim * (kCoordBits - e.level));
  }
  if (volume != std::uint64_t{1} << (dim * kCoordBits)) throw ArgumentError("leaves do not tile the unit domain");
  // Distinct dyadic cells with no ancestor/descendant pair are disjoint.
  for (const auto& e : leaves_) {
    for (int l = min_level_; l < e.level; ++l) {
      std::array<std::uint32_t, 3> a = e.anchor;
      const std::uint32_t mask = ~((kRootLength >> l) - 1u);
      for (int k = 0; k < dim; ++k) a[k] &= mask;
      if (index_.count(leaf_key(l, a, dim))) throw ArgumentError("overlapping leaves");
    }
  }
}

std::optional<int> AdaptiveMesh::find(int level, const std::array<std::uint32_t, 3>& anchor) const {
  auto it = index_.find(leaf_key(level, anchor, dim_));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int AdaptiveMesh::leaf_containing(const std::array<std::int64_t, 3>& point) const {
  std::array<std::uint32_t, 3> p{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    if (point[a] < 0 || point[a] >= static_cast<std::int64_t>(kRootLength)) return -1;
    p[a] = static_cast<std::uint32_t>(point[a]);
  }
  for (int l = max_level_; l >= min_level_; --l) {
    std::array<std::uint32_t, 3> a = p;
    const std::uint32_t mask = ~((kRootLength >> l) - 1u);
    for (int k = 0; k < dim_; ++k) a[k] &= mask;
    if (auto hit = find(l, a)) return *hit;
  }
  return -1;
}

int AdaptiveMesh::face_neighbor(int e, int axis, int side) const {
  const auto& el = leaves_[e];
  std::array<std::int64_t, 3> probe{el.anchor[0], el.anchor[1], el.anchor[2]};
  probe[axis] += side == 1 ? static_cast<std::int64_t>(el.int_size()) : -1;
  return leaf_containing(probe);
}

double AdaptiveMesh::volume() const {
  double v = 0.0;
  for (const auto& e : leaves_) v += std::pow(e.size(), dim_);
  return v;
}

bool AdaptiveMesh::is_balanced() const {
  for (int e = 0; e < size(); ++e)
    for (int a = 0; a < dim_; ++a)
      for (int s = 0; s < 2; ++s) {
        const int n = face_neighbor(e, a, s);
        if (n >= 0 && std::abs(leaves_[n].level - leaves_[e].level) > 1) return false;
      }
  return true;
}

void AdaptiveMesh::write(std::ostream& out) const {
  for (const auto& e : leaves_) {
    out << e.level;
    for (int a = 0; a < dim_; ++a) out << ' ' << dyadic(e.anchor[a]);
    out << '\n';
  }
}

AdaptiveMesh build_uniform(int dim, int level) {
  check_dim(dim);
  if (level < 0 || level > kMaxMeshLevel)
    throw ArgumentError("uniform level must lie in [0, " + std::to_string(kMaxMeshLevel) + "]");
  std::vector<Element> out;
  subdivide(Element{}, dim, level, out);
  return AdaptiveMesh(dim, std::move(out));
}

bool ball_matches(const BallCriterion& c, const Element& e, int dim) {
  if (e.level >= c.max_level) return false;
  const double h = e.size();
  const double h_base = std::ldexp(1.0, -c.base_level);
  const double radius = std::ldexp(1.0, dim) * h * h / h_base;
  const Point x = e.centroid(dim);
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += (x[a] - c.center[a]) * (x[a] - c.center[a]);
  return r2 <= radius * radius;
}

bool ring_overlaps(const RingOverlapCriterion& c, const Element& e, int dim) {
  if (!(c.inner < c.outer)) return false;
  const Point lo = e.lower();
  const double h = e.size();
  double near2 = 0.0, far2 = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double l = lo[a] - c.center[a];
    const double u = l + h;
    const double near = l > 0.0 ? l : (u < 0.0 ? -u : 0.0);
    const double far = std::max(std::abs(l), std::abs(u));
    near2 += near * near;
    far2 += far * far;
  }
  return std::sqrt(near2) < c.outer && std::sqrt(far2) > c.inner;
}

AdaptiveMesh balance_2to1(const AdaptiveMesh& mesh) {
  const int dim = mesh.dim();
  AdaptiveMesh current = mesh;
  for (;;) {
    std::vector<char> mark(current.size(), 0);
    bool any = false;
    for (int e = 0; e < current.size(); ++e)
      for (int a = 0; a < dim; ++a)
        for (int s = 0; s < 2; ++s) {
          const int n = current.face_neighbor(e, a, s);
          if (n >= 0 && current.leaf(n).level < current.leaf(e).level - 1) {
            mark[n] = 1;
            any = true;
          }
        }
    if (!any) return current;
    std::vector<Element> next;
    next.reserve(current.size() + 8 * std::count(mark.begin(), mark.end(), 1));
    for (int e = 0; e < current.size(); ++e) subdivide(current.leaf(e), dim, mark[e] ? 1 : 0, next);
    current = AdaptiveMesh(dim, std::move(next));
  }
}

AdaptiveMesh refine(const AdaptiveMesh& mesh, const RefinementCriterion& criterion) {
  const int dim = mesh.dim();
  if (const auto* ball = std::get_if<BallCriterion>(&criterion)) {
    std::vector<Element> next;
    bool any = false;
    for (const auto& e : mesh.leaves()) {
      const int times = ball_matches(*ball, e, dim) ? std::min(ball->extra_levels, ball->max_level - e.level) : 0;
      any = any || times > 0;
      subdivide(e, dim, std::max(times, 0), next);
    }
    if (!any) return mesh;
    return balance_2to1(AdaptiveMesh(dim, std::move(next)));
  }
  const auto& ring = std::get<RingOverlapCriterion>(criterion);
  AdaptiveMesh current = mesh;
  bool changed = false;
  for (;;) {
    std::vector<Element> next;
    bool any = false;
    for (const auto& e : current.leaves()) {
      const bool split = e.level < ring.target_level && ring_overlaps(ring, e, dim);
      any = any || split;
      subdivide(e, dim, split ? 1 : 0, next);
    }
    if (!any) break;
    changed = true;
    current = AdaptiveMesh(dim, std::move(next));
  }
  if (!changed) return mesh;
  return balance_2to1(current);
}

// ---------------------------------------------------------------------------

BoundarySpec BoundarySpec::neumann_y() {
  BoundarySpec b;
  b.faces[2] = BoundaryKind::Neumann;
  b.faces[3] = BoundaryKind::Neumann;
  return b;
}

int DofMap::hanging_count() const {
  return static_cast<int>(std::count_if(faces.begin(), faces.end(),
                                        [](const FaceDof& f) { return f.status == FaceStatus::InteriorHanging; }));
}

namespace {

std::uint64_t face_key(int axis, int level, const std::array<std::uint32_t, 3>& corner) {
  return (static_cast<std::uint64_t>(axis) << 56) | (static_cast<std::uint64_t>(level) << 51) |
         (static_cast<std::uint64_t>(corner[0]) << 34) | (static_cast<std::uint64_t>(corner[1]) << 17) |
         static_cast<std::uint64_t>(corner[2]);
}

}  // namespace

DofMap enumerate_dofs(const AdaptiveMesh& mesh, const BoundarySpec& boundary) {
  const int dim = mesh.dim();
  bool has_dirichlet = false;
  for (int f = 0; f < 2 * dim; ++f) has_dirichlet = has_dirichlet || boundary.faces[f] == BoundaryKind::Dirichlet;
  if (!has_dirichlet) throw ArgumentError("boundary specification leaves the Dirichlet boundary empty");

  DofMap map;
  map.dim = dim;
  map.n_p = mesh.size();
  constexpr int kUnused = std::numeric_limits<int>::min();
  map.element_faces.assign(mesh.size(), {kUnused, kUnused, kUnused, kUnused, kUnused, kUnused});
  map.element_dofs.assign(mesh.size(), {kUnused, kUnused, kUnused, kUnused, kUnused, kUnused});

  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(static_cast<std::size_t>(mesh.size()) * dim * 2);
  auto get_face = [&](int axis, int level, const std::array<std::uint32_t, 3>& corner) {
    auto [it, fresh] = lookup.emplace(face_key(axis, level, corner), static_cast<int>(map.faces.size()));
    if (fresh) {
      FaceDof f;
      f.axis = axis;
      f.level = level;
      const double unit = 1.0 / static_cast<double>(kRootLength);
      const double half = 0.5 / static_cast<double>(1u << level);
      for (int a = 0; a < dim; ++a) f.center[a] = corner[a] * unit + (a == axis ? 0.0 : half);
      map.faces.push_back(f);
    }
    return it->second;
  };

  for (int e = 0; e < mesh.size(); ++e) {
    const Element& el = mesh.leaf(e);
    for (int axis = 0; axis < dim; ++axis) {
      for (int side = 0; side < 2; ++side) {
        std::array<std::uint32_t, 3> corner = el.anchor;
        corner[axis] += side * el.int_size();
        const int mine = 1 - side;  // owner slot of e on this face
        int id;
        if (corner[axis] == 0 || corner[axis] == kRootLength) {
          id = get_face(axis, el.level, corner);
          map.faces[id].status = boundary.at(axis, side) == BoundaryKind::Dirichlet ? FaceStatus::BoundaryDirichlet
                                                                                   : FaceStatus::BoundaryNeumann;
          map.faces[id].owners[mine] = e;
        } else {
          const int n = mesh.face_neighbor(e, axis, side);
          const int nl = mesh.leaf(n).level;
          id = get_face(axis, el.level, corner);
          map.faces[id].owners[mine] = e;
          if (nl == el.level) {
            map.faces[id].owners[side] = n;
          } else if (nl < el.level) {
            std::array<std::uint32_t, 3> master_corner = corner;
            const std::uint32_t mask = ~((kRootLength >> nl) - 1u);
            for (int a = 0; a < dim; ++a)
              if (a != axis) master_corner[a] &= mask;
            const int master = get_face(axis, nl, master_corner);
            map.faces[id].status = FaceStatus::InteriorHanging;
            map.faces[id].master = master;
            map.faces[id].owners[side] = n;
            map.faces[master].owners[side] = n;
            if (master_corner == corner) map.faces[master].owners[mine] = e;
          }
        }
        map.element_faces[e][2 * axis + side] = id;
      }
    }
  }

  for (auto& f : map.faces) {
    if (f.status == FaceStatus::InteriorRegular || f.status == FaceStatus::BoundaryDirichlet) {
      f.flux_index = map.n_u++;
    } else if (f.status == FaceStatus::BoundaryNeumann) {
      f.neumann_slot = static_cast<int>(map.neumann_faces.size());
      map.neumann_faces.push_back(static_cast<int>(&f - map.faces.data()));
    }
  }
  map.flux_faces.resize(map.n_u);
  for (int id = 0; id < static_cast<int>(map.faces.size()); ++id) {
    auto& f = map.faces[id];
    if (f.status == FaceStatus::InteriorHanging) {
      const auto& m = map.faces[f.master];
      if (m.status != FaceStatus::InteriorRegular) throw Error("hanging face has a non-regular master");
      f.flux_index = m.flux_index;
    } else if (f.flux_index >= 0) {
      map.flux_faces[f.flux_index] = id;
    }
  }
  for (int e = 0; e < mesh.size(); ++e)
    for (int lf = 0; lf < 2 * dim; ++lf) {
      const auto& f = map.faces[map.element_faces[e][lf]];
      map.element_dofs[e][lf] = f.status == FaceStatus::BoundaryNeumann ? -(f.neumann_slot + 1) : f.flux_index;
    }
  return map;
}

}  // namespace saddlemg
