/** @file mesh.hpp
 *  @brief Structured triangulation of the unit square and typed DoF enumeration.
 */
#pragma once

#include <array>
#include <string_view>
#include <vector>

namespace biot {

/// The ten DoF kinds, in the global (kind-major) ordering.
/// X-normal entities live on vertical edges, Y-normal entities on horizontal edges.
enum class DofKind : int {
  P1x = 0,
  P1y,
  BubbleDiag,
  BubbleX,
  BubbleY,
  FluxDiag,
  FluxX,
  FluxY,
  P0Lower,
  P0Upper
};
inline constexpr int kNumDofKinds = 10;

enum class EdgeKind : int { Diag = 0, X = 1, Y = 2 };
enum class Field : int { Displacement = 0, Darcy = 1, Pressure = 2 };
enum class PatchKind { Displacement8, Full20 };

/// Bit mask of the faces of the unit square.
namespace face {
inline constexpr unsigned Left = 1u, Right = 2u, Bottom = 4u, Top = 8u, All = 15u;
}

std::string_view kind_name(DofKind k);
Field field_of(DofKind k);
inline int kind_index(DofKind k) { return static_cast<int>(k); }

/// Lattice offset of a DoF kind inside its cell, in units of h.
/// Both P0 kinds are placed at the cell centre.
std::array<double, 2> kind_offset_in_cell(DofKind k);

struct Index2 {
  int i = 0;
  int j = 0;
};

struct EdgeRef {
  EdgeKind kind;
  int i;
  int j;
};

/// One triangle of the cut cell (i,j). Vertices are unwrapped lattice
/// coordinates; edges[a] is the edge opposite vertices[a].
struct TriangleRef {
  bool upper;
  int i;
  int j;
  std::array<Index2, 3> vertices;
  std::array<EdgeRef, 3> edges;
};

struct DofInfo {
  DofKind kind;
  int i;
  int j;
};

class StructuredMesh {
 public:
  /// Unit square with N points per side (N = 2^l + 1).
  static StructuredMesh uniform(int n_points_per_side);
  /// Doubly periodic lattice with n cells per side and spacing h = 1/n.
  static StructuredMesh periodic(int cells_per_side);

  bool is_periodic() const { return periodic_; }
  int points_per_side() const { return periodic_ ? n_ : n_ + 1; }
  int cells_per_side() const { return n_; }
  double h() const { return h_; }

  int num_vertices() const;
  int num_edges(EdgeKind k) const;
  int num_edges() const;
  int num_triangles() const { return 2 * n_ * n_; }

  int kind_size(DofKind k) const;
  int kind_offset(DofKind k) const { return offsets_[kind_index(k)]; }
  int field_offset(Field f) const;
  int field_size(Field f) const;
  int num_dofs() const { return offsets_[kNumDofKinds]; }

  /// Whether lattice indices (i,j) address an existing entity of kind k.
  bool valid(DofKind k, int i, int j) const;
  /// Index of an entity within its kind; wraps when periodic.
  int local_index(DofKind k, int i, int j) const;
  /// Global DoF index in the kind-major layout.
  int dof(DofKind k, int i, int j) const { return kind_offset(k) + local_index(k, i, j); }
  int edge_dof(EdgeKind e, bool flux, int i, int j) const;

  DofInfo dof_info(int global) const;
  /// Physical location of a DoF (vertex, edge midpoint or cell centre).
  std::array<double, 2> dof_position(int global) const;
  bool on_boundary(DofKind k, int i, int j) const;
  /// Faces (see namespace face) that contain the entity; 0 for interior entities.
  unsigned boundary_faces(DofKind k, int i, int j) const;
  std::vector<int> boundary_dofs(DofKind k, unsigned faces = face::All) const;

  TriangleRef triangle(bool upper, int i, int j) const;
  std::vector<TriangleRef> triangles() const;

 private:
  StructuredMesh(int n, bool periodic);
  int wrap(int i) const;

  int n_ = 0;
  bool periodic_ = false;
  double h_ = 0.0;
  std::array<int, kNumDofKinds + 1> offsets_{};
};

struct PatchIndexSet {
  int center_vertex = 0;
  Index2 center{};
  PatchKind kind = PatchKind::Full20;
  std::vector<int> dofs;
  std::vector<DofKind> kinds;
  /// Offset of each DoF from the centre vertex in units of h.
  std::vector<std::array<double, 2>> offsets;
};

StructuredMesh build_uniform_mesh(int n_points_per_side);
/// Standard coarsening; throws std::invalid_argument when N = 3.
StructuredMesh coarsen(const StructuredMesh& mesh);
/// One patch per vertex. Boundary patches keep only existing DoFs.
std::vector<PatchIndexSet> vertex_patches(const StructuredMesh& mesh, PatchKind kind);
/// Number of patches containing each global DoF.
std::vector<int> patch_multiplicity(const StructuredMesh& mesh,
                                    const std::vector<PatchIndexSet>& patches);

}  // namespace biot
