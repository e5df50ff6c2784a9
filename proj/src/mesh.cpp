#include "biot/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace biot {

std::string_view kind_name(DofKind k) {
  static constexpr std::array<std::string_view, kNumDofKinds> names = {
      "P1x", "P1y", "BubbleDiag", "BubbleX", "BubbleY",
      "FluxDiag", "FluxX", "FluxY", "P0Lower", "P0Upper"};
  return names[kind_index(k)];
}

Field field_of(DofKind k) {
  const int i = kind_index(k);
  if (i < 5) return Field::Displacement;
  if (i < 8) return Field::Darcy;
  return Field::Pressure;
}

std::array<double, 2> kind_offset_in_cell(DofKind k) {
  switch (k) {
    case DofKind::P1x:
    case DofKind::P1y:
      return {0.0, 0.0};
    case DofKind::BubbleX:
    case DofKind::FluxX:
      return {0.0, 0.5};
    case DofKind::BubbleY:
    case DofKind::FluxY:
      return {0.5, 0.0};
    default:
      return {0.5, 0.5};
  }
}

namespace {

bool is_vertex_kind(DofKind k) { return k == DofKind::P1x || k == DofKind::P1y; }
bool is_x_edge_kind(DofKind k) { return k == DofKind::BubbleX || k == DofKind::FluxX; }
bool is_y_edge_kind(DofKind k) { return k == DofKind::BubbleY || k == DofKind::FluxY; }

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

StructuredMesh::StructuredMesh(int n, bool periodic) : n_(n), periodic_(periodic), h_(1.0 / n) {
  offsets_[0] = 0;
  for (int k = 0; k < kNumDofKinds; ++k)
    offsets_[k + 1] = offsets_[k] + kind_size(static_cast<DofKind>(k));
}

StructuredMesh StructuredMesh::uniform(int n_points_per_side) {
  if (n_points_per_side < 3 || !is_power_of_two(n_points_per_side - 1))
    throw std::invalid_argument("points per side must be 2^l + 1 with l >= 1, got " +
                                std::to_string(n_points_per_side));
  return StructuredMesh(n_points_per_side - 1, false);
}

StructuredMesh StructuredMesh::periodic(int cells_per_side) {
  if (cells_per_side < 2)
    throw std::invalid_argument("periodic lattice needs at least 2 cells per side");
  return StructuredMesh(cells_per_side, true);
}

int StructuredMesh::wrap(int i) const { return ((i % n_) + n_) % n_; }

int StructuredMesh::num_vertices() const {
  const int np = points_per_side();
  return np * np;
}

int StructuredMesh::num_edges(EdgeKind k) const {
  if (periodic_ || k == EdgeKind::Diag) return n_ * n_;
  return n_ * (n_ + 1);
}

int StructuredMesh::num_edges() const {
  return num_edges(EdgeKind::Diag) + num_edges(EdgeKind::X) + num_edges(EdgeKind::Y);
}

int StructuredMesh::kind_size(DofKind k) const {
  if (is_vertex_kind(k)) return num_vertices();
  if (is_x_edge_kind(k)) return num_edges(EdgeKind::X);
  if (is_y_edge_kind(k)) return num_edges(EdgeKind::Y);
  return n_ * n_;
}

int StructuredMesh::field_offset(Field f) const {
  switch (f) {
    case Field::Displacement:
      return kind_offset(DofKind::P1x);
    case Field::Darcy:
      return kind_offset(DofKind::FluxDiag);
    default:
      return kind_offset(DofKind::P0Lower);
  }
}

int StructuredMesh::field_size(Field f) const {
  switch (f) {
    case Field::Displacement:
      return kind_offset(DofKind::FluxDiag);
    case Field::Darcy:
      return kind_offset(DofKind::P0Lower) - kind_offset(DofKind::FluxDiag);
    default:
      return num_dofs() - kind_offset(DofKind::P0Lower);
  }
}

bool StructuredMesh::valid(DofKind k, int i, int j) const {
  if (periodic_) return true;
  const int imax = (is_vertex_kind(k) || is_x_edge_kind(k)) ? n_ + 1 : n_;
  const int jmax = (is_vertex_kind(k) || is_y_edge_kind(k)) ? n_ + 1 : n_;
  return i >= 0 && j >= 0 && i < imax && j < jmax;
}

int StructuredMesh::local_index(DofKind k, int i, int j) const {
  if (periodic_) return wrap(j) * n_ + wrap(i);
  if (!valid(k, i, j))
    throw std::out_of_range("lattice index out of range for kind " + std::string(kind_name(k)));
  const int width = (is_vertex_kind(k) || is_x_edge_kind(k)) ? n_ + 1 : n_;
  return j * width + i;
}

int StructuredMesh::edge_dof(EdgeKind e, bool flux, int i, int j) const {
  const int base = flux ? kind_index(DofKind::FluxDiag) : kind_index(DofKind::BubbleDiag);
  return dof(static_cast<DofKind>(base + static_cast<int>(e)), i, j);
}

DofInfo StructuredMesh::dof_info(int global) const {
  if (global < 0 || global >= num_dofs()) throw std::out_of_range("DoF index out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global);
  const int k = static_cast<int>(it - offsets_.begin()) - 1;
  const auto kind = static_cast<DofKind>(k);
  const int local = global - offsets_[k];
  int width = n_;
  if (!periodic_ && (is_vertex_kind(kind) || is_x_edge_kind(kind))) width = n_ + 1;
  return {kind, local % width, local / width};
}

std::array<double, 2> StructuredMesh::dof_position(int global) const {
  const DofInfo d = dof_info(global);
  const auto off = kind_offset_in_cell(d.kind);
  return {(d.i + off[0]) * h_, (d.j + off[1]) * h_};
}

unsigned StructuredMesh::boundary_faces(DofKind k, int i, int j) const {
  if (periodic_) return 0u;
  unsigned f = 0u;
  const bool vx = is_vertex_kind(k) || is_x_edge_kind(k);
  const bool vy = is_vertex_kind(k) || is_y_edge_kind(k);
  if (vx && i == 0) f |= face::Left;
  if (vx && i == n_) f |= face::Right;
  if (vy && j == 0) f |= face::Bottom;
  if (vy && j == n_) f |= face::Top;
  return f;
}

bool StructuredMesh::on_boundary(DofKind k, int i, int j) const {
  return boundary_faces(k, i, j) != 0u;
}

std::vector<int> StructuredMesh::boundary_dofs(DofKind k, unsigned faces) const {
  std::vector<int> out;
  const int off = kind_offset(k);
  for (int l = 0; l < kind_size(k); ++l) {
    const DofInfo d = dof_info(off + l);
    if (boundary_faces(k, d.i, d.j) & faces) out.push_back(off + l);
  }
  return out;
}

TriangleRef StructuredMesh::triangle(bool upper, int i, int j) const {
  TriangleRef t{upper, i, j, {}, {}};
  if (!upper) {
    t.vertices = {Index2{i, j}, Index2{i + 1, j}, Index2{i, j + 1}};
    t.edges = {EdgeRef{EdgeKind::Diag, i, j}, EdgeRef{EdgeKind::X, i, j},
               EdgeRef{EdgeKind::Y, i, j}};
  } else {
    t.vertices = {Index2{i + 1, j}, Index2{i + 1, j + 1}, Index2{i, j + 1}};
    t.edges = {EdgeRef{EdgeKind::Y, i, j + 1}, EdgeRef{EdgeKind::Diag, i, j},
               EdgeRef{EdgeKind::X, i + 1, j}};
  }
  return t;
}

std::vector<TriangleRef> StructuredMesh::triangles() const {
  std::vector<TriangleRef> out;
  out.reserve(num_triangles());
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) {
      out.push_back(triangle(false, i, j));
      out.push_back(triangle(true, i, j));
    }
  return out;
}

StructuredMesh build_uniform_mesh(int n_points_per_side) {
  return StructuredMesh::uniform(n_points_per_side);
}

StructuredMesh coarsen(const StructuredMesh& mesh) {
  const int n = mesh.cells_per_side();
  if (mesh.is_periodic()) {
    if (n % 2 != 0 || n < 4) throw std::invalid_argument("periodic lattice cannot be coarsened");
    return StructuredMesh::periodic(n / 2);
  }
  if (n < 4) throw std::invalid_argument("mesh with N = 3 has no coarser level");
  return StructuredMesh::uniform(n / 2 + 1);
}

std::vector<PatchIndexSet> vertex_patches(const StructuredMesh& mesh, PatchKind kind) {
  struct Candidate {
    DofKind kind;
    int di;
    int dj;
  };
  // Order: centre P1, incident edges (NW/SE diagonal, up/down vertical,
  // right/left horizontal), then the six incident triangles.
  static const std::array<Candidate, 8> disp = {{{DofKind::P1x, 0, 0},
                                                 {DofKind::P1y, 0, 0},
                                                 {DofKind::BubbleDiag, -1, 0},
                                                 {DofKind::BubbleDiag, 0, -1},
                                                 {DofKind::BubbleX, 0, 0},
                                                 {DofKind::BubbleX, 0, -1},
                                                 {DofKind::BubbleY, 0, 0},
                                                 {DofKind::BubbleY, -1, 0}}};
  static const std::array<Candidate, 12> rest = {{{DofKind::FluxDiag, -1, 0},
                                                  {DofKind::FluxDiag, 0, -1},
                                                  {DofKind::FluxX, 0, 0},
                                                  {DofKind::FluxX, 0, -1},
                                                  {DofKind::FluxY, 0, 0},
                                                  {DofKind::FluxY, -1, 0},
                                                  {DofKind::P0Lower, 0, 0},
                                                  {DofKind::P0Lower, -1, 0},
                                                  {DofKind::P0Lower, 0, -1},
                                                  {DofKind::P0Upper, -1, 0},
                                                  {DofKind::P0Upper, -1, -1},
                                                  {DofKind::P0Upper, 0, -1}}};
  const int np = mesh.points_per_side();
  std::vector<PatchIndexSet> patches;
  patches.reserve(static_cast<size_t>(np) * np);
  for (int j = 0; j < np; ++j)
    for (int i = 0; i < np; ++i) {
      PatchIndexSet p;
      p.center = {i, j};
      p.center_vertex = mesh.local_index(DofKind::P1x, i, j);
      p.kind = kind;
      auto add = [&](const Candidate& c) {
        const int ci = i + c.di, cj = j + c.dj;
        if (!mesh.valid(c.kind, ci, cj)) return;
        const auto off = kind_offset_in_cell(c.kind);
        p.dofs.push_back(mesh.dof(c.kind, ci, cj));
        p.kinds.push_back(c.kind);
        p.offsets.push_back({c.di + off[0], c.dj + off[1]});
      };
      for (const auto& c : disp) add(c);
      if (kind == PatchKind::Full20)
        for (const auto& c : rest) add(c);
      patches.push_back(std::move(p));
    }
  return patches;
}

std::vector<int> patch_multiplicity(const StructuredMesh& mesh,
                                    const std::vector<PatchIndexSet>& patches) {
  std::vector<int> count(mesh.num_dofs(), 0);
  for (const auto& p : patches)
    for (int d : p.dofs) ++count[d];
  return count;
}

}  // namespace biot
