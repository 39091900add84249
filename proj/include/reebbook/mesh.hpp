#pragma once

// Triangulation of the assembled contact manifold.
//
// The complex is a cell-by-cell product build over the structured charts:
//
//  * Each annulus block |r| <= r_cut is a stack of vertex tori (rows at fixed
//    radii x n_phi columns x n_theta fiber levels).  Rows are placed exactly
//    where the twist equals an integer number of columns, so the fiber seam
//    (c = period wraps to c = 0 composed with the twist) acts on column
//    indices as j -> j + kappa_i with integer kappa_i.  Between adjacent rows
//    the seam shear changes by at most one column; the mismatch is absorbed
//    by a slab of flat "flip" tetrahedra realizing the diagonal exchange of
//    each quad (a 2-2 bistellar move), which is what makes the mapping-torus
//    combinatorics — and hence the global first homology — correct.
//
//  * Each binding component carries a solid torus: a triangulated meridian
//    disk (center + concentric rings, the outermost ring at rho_edge where
//    h1(rho_edge) = r_cut) swept along the binding circle.  The outer ring is
//    not built: it is identified vertex-by-vertex with the +-r_cut rows of
//    the annulus blocks (over arc segments) and with tube-patch front rows
//    (over edge segments of a merged boundary circle).
//
//  * Each connecting tube contributes a patch covering the region of the
//    tube chart between the two Liouville fronts (the images of the two
//    boundary edges flowed inward to depth tau = -log r_cut).  Patch columns
//    sit at uniform s, the end columns coincide with annulus grid columns
//    inside the attachment windows, and the front rows supply the binding
//    weld stations over edge segments.
//
// Prisms are split into tetrahedra with quad diagonals chosen by the global
// minimal vertex id of the quad, which is symmetric in the two cells sharing
// a quad, so the face tables of neighboring blocks agree automatically.  A
// prism whose three quad diagonals form a cyclic pattern is split with one
// interior (Steiner) vertex instead.  All tetrahedra are oriented positively
// for the coorientation induced by the contact form; flat flip tetrahedra
// receive their orientation from their neighbors, and global consistency
// (every interior face induced with opposite signs from its two sides) is
// verified.

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "reebbook/openbook.hpp"

namespace reebbook {

struct MeshVertex {
  enum class Owner : std::uint8_t { Annulus, Patch, Core, Shell, Steiner };
  MPoint pos;  // canonical chart coordinates
  Owner owner = Owner::Steiner;
  int region = -1;                     // annulus / tube / binding index
  std::array<int, 3> addr{-1, -1, -1};  // (i,j,l), (k,m,l), (s,k,m) or (k,0,0)
};

// Catalog entry: the tetrahedra of one prism cell, stored contiguously.
struct CellRef {
  int first = -1;
  int count = 0;
};

struct AnnulusGrid {
  std::vector<double> radii;   // rows, ascending, from -r_cut to +r_cut
  std::vector<int> kappa;      // exact column twist of the fiber seam per row
  std::vector<double> period;  // fiber period at each row
  std::vector<int> vid;        // rows * n_phi * n_theta vertex ids
  // cells: per band (rows i, i+1), per layer l, per column J, per triangle
  // (0 = upper A-type, 1 = lower B-type)
  std::vector<CellRef> prism;  // bands * n_theta * n_phi * 2
  std::vector<int> flip;       // bands * n_phi, tet id or -1
  int rows() const { return static_cast<int>(radii.size()); }
  int bands() const { return rows() - 1; }
  int row_of(double r) const;  // nearest row index
};

struct PatchGrid {
  int tube = -1;
  int n_e = 0;                         // columns 0..n_e
  int n_t = 0;                         // rows 0..n_t
  std::vector<double> s;               // column positions, ascending
  std::vector<std::vector<double>> t;  // t[k][m]
  std::vector<int> vid;                // (n_e+1) * (n_t+1) * n_theta
  std::vector<CellRef> prism;          // n_e * n_t * 2 * n_theta
};

struct BindingStation {
  double theta = 0.0;
  int seg = -1;        // index into the boundary circle's segment list
  bool on_arc = true;  // arc station (annulus weld) or edge station (patch)
  int annulus = -1, row = -1, j = -1;  // arc: annulus grid position
  int tube = -1, patch_col = -1, patch_row = -1;  // edge: patch front vertex
};

struct BindingGrid {
  double rho_edge = 0.0;       // h1(rho_edge) = r_cut
  std::vector<double> rings;   // 0 < rho_0 < ... < rho_{S-1} = rho_edge
  std::vector<BindingStation> stations;  // around the circle, theta ascending
  std::vector<int> core;       // n_c vertex ids
  std::vector<int> shell;      // S * n_c * n_theta (outer ring aliased)
  // meridian-disk triangles, as indices into the disk vertex list
  // (0 = center, 1 + s*n_theta + m = ring s, meridian position m)
  std::vector<std::array<int, 3>> disk_tris;
  std::vector<CellRef> prism;  // n_c * disk_tris.size()
  int n_c() const { return static_cast<int>(stations.size()); }
  int n_rings() const { return static_cast<int>(rings.size()); }
  int ring_of(double rho) const;  // nearest ring index
};

struct Triangulation {
  // simplex tables
  std::vector<MeshVertex> vertices;
  std::vector<std::array<int, 4>> tets;    // positively oriented
  std::vector<std::array<int, 3>> tris;    // canonical: v0 < v1 < v2
  std::vector<std::array<int, 2>> edges;   // canonical: v0 < v1
  std::vector<std::array<int, 4>> tet_tris;
  std::vector<std::array<std::int8_t, 4>> tet_tri_sign;  // d3 incidence
  std::vector<std::array<int, 3>> tri_edges;
  std::vector<std::array<std::int8_t, 3>> tri_edge_sign;  // d2 incidence
  std::vector<std::array<int, 2>> tri_tets;  // the two tets on each face

  // structured grids
  int resolution = 1;
  int n_phi = 0, n_theta = 0;
  double colw = 0.0, r_cut = 0.0;
  std::vector<AnnulusGrid> ann;    // per annulus
  std::vector<PatchGrid> patch;    // per tube
  std::vector<BindingGrid> bind;   // per binding component

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_tris() const { return static_cast<int>(tris.size()); }
  int num_tets() const { return static_cast<int>(tets.size()); }
  long euler() const {
    return static_cast<long>(num_vertices()) - num_edges() + num_tris() -
           num_tets();
  }

  // Structured vertex access.  Column indices wrap modulo n_phi; fiber levels
  // wrap modulo n_theta, and every level wrap of an annulus grid shifts the
  // column by the row's seam twist kappa, so walking an orbit through the
  // fiber seam lands on the correct vertex automatically.
  int ann_vid(int a, int row, int j, int l) const;
  int patch_vid(int tube, int k, int m, int l) const;  // l wraps trivially
  int core_vid(int b, int k) const;                    // k wraps
  int shell_vid(int b, int s, int k, int m) const;     // k, m wrap

  // Structured cell access.
  CellRef ann_prism(int a, int band, int layer, int j, int ab) const;
  int ann_flip(int a, int band, int j) const;  // -1 if the band has no slab
  CellRef patch_prism(int tube, int k, int m, int ab, int layer) const;
  CellRef bind_prism(int b, int k, int dtri) const;

  // Lookup helpers (return -1 when absent).
  int edge_id(int u, int v) const;
  int tri_id(int a, int b, int c) const;
  int tri_between(int tetA, int tetB) const;
  // d3 incidence sign of face `tri` in tet `tet` (0 if not a face of it).
  // The sign of a dual-path crossing that exits `tet` through `tri`.
  int exit_sign(int tet, int tri) const;

  // Invariants: closed (every face in exactly two tets, opposite induced
  // signs), boundary-of-boundary zero over the integers, Euler number zero.
  void validate() const;

  // internal lookup tables (filled by finalize)
  void build_lookup();

 private:
  std::unordered_map<std::uint64_t, int> edge_map_;
  std::unordered_map<std::uint64_t, int> tri_map_;
};

// Builds the triangulation at the requested resolution (>= 1).  Resolution r
// uses 12*r columns, 4*r fiber levels, and proportionally many meridian-disk
// rings and patch columns.  Throws std::runtime_error with the offending
// face when a gluing inconsistency would make the complex non-manifold, and
// std::invalid_argument for geometric preconditions (window centers away
// from grid columns, non-monotone Liouville fronts, unreachable weld depth).
Triangulation triangulate(const OpenBookManifold& M, int resolution);

// Assembles a Triangulation from raw tetrahedron data (no structured grids):
// used for small closed-manifold fixtures in tests.  Orientations are
// propagated from tets[0] across shared faces; a closed orientable complex
// is required.
Triangulation make_complex(int num_vertices,
                           const std::vector<std::array<int, 4>>& tets);

}  // namespace reebbook
