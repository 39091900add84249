#include "reebbook/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "reebbook/smooth.hpp"

namespace reebbook {
namespace {

using Vec3 = std::array<double, 3>;

double det3(const Vec3& u, const Vec3& v, const Vec3& w) {
  return u[0] * (v[1] * w[2] - v[2] * w[1]) -
         u[1] * (v[0] * w[2] - v[2] * w[0]) +
         u[2] * (v[0] * w[1] - v[1] * w[0]);
}

double tet_det(const std::array<Vec3, 4>& p) {
  Vec3 u{p[1][0] - p[0][0], p[1][1] - p[0][1], p[1][2] - p[0][2]};
  Vec3 v{p[2][0] - p[0][0], p[2][1] - p[0][1], p[2][2] - p[0][2]};
  Vec3 w{p[3][0] - p[0][0], p[3][1] - p[0][1], p[3][2] - p[0][2]};
  return det3(u, v, w);
}

constexpr std::uint64_t kIdBits = 21;  // vertex ids must stay below 2^21

std::uint64_t edge_key(int u, int v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << kIdBits) | static_cast<std::uint64_t>(v);
}

std::uint64_t tri_key(std::array<int, 3> t) {
  std::sort(t.begin(), t.end());
  return (((static_cast<std::uint64_t>(t[0]) << kIdBits) |
           static_cast<std::uint64_t>(t[1]))
          << kIdBits) |
         static_cast<std::uint64_t>(t[2]);
}

// parity of the permutation sorting a 3-tuple: +1 even, -1 odd
int sort_parity3(const std::array<int, 3>& f) {
  int inv = 0;
  if (f[0] > f[1]) ++inv;
  if (f[0] > f[2]) ++inv;
  if (f[1] > f[2]) ++inv;
  return (inv % 2 == 0) ? +1 : -1;
}

std::array<int, 3> tet_face(const std::array<int, 4>& t, int i) {
  switch (i) {
    case 0: return {t[1], t[2], t[3]};
    case 1: return {t[0], t[2], t[3]};
    case 2: return {t[0], t[1], t[3]};
    default: return {t[0], t[1], t[2]};
  }
}

// incidence sign of face i (as the canonical sorted triple) in the tet
int face_incidence(const std::array<int, 4>& t, int i) {
  const std::array<int, 3> f = tet_face(t, i);
  const int base = (i % 2 == 0) ? +1 : -1;
  return base * sort_parity3(f);
}

std::string describe_vertex(const Triangulation& T, int v) {
  const MeshVertex& V = T.vertices.at(static_cast<size_t>(v));
  std::ostringstream os;
  os << "v" << v << "(";
  switch (V.owner) {
    case MeshVertex::Owner::Annulus: os << "annulus " << V.region << " row " << V.addr[0] << " col " << V.addr[1] << " level " << V.addr[2]; break;
    case MeshVertex::Owner::Patch: os << "patch " << V.region << " col " << V.addr[0] << " row " << V.addr[1] << " level " << V.addr[2]; break;
    case MeshVertex::Owner::Core: os << "core " << V.region << " station " << V.addr[0]; break;
    case MeshVertex::Owner::Shell: os << "shell " << V.region << " ring " << V.addr[0] << " station " << V.addr[1] << " meridian " << V.addr[2]; break;
    case MeshVertex::Owner::Steiner: os << "steiner " << V.region; break;
  }
  os << ")";
  return os.str();
}

[[noreturn]] void non_manifold(const Triangulation& T, const std::array<int, 3>& f,
                               const char* why) {
  std::ostringstream os;
  os << "non-manifold gluing: face {" << describe_vertex(T, f[0]) << ", "
     << describe_vertex(T, f[1]) << ", " << describe_vertex(T, f[2]) << "} "
     << why;
  throw std::runtime_error(os.str());
}

// Builds the canonical face/edge tables and incidence signs; verifies that
// the complex is a closed oriented pseudomanifold.  Orientations of all tets
// must already be final.
void build_tables(Triangulation& T) {
  const int nt = T.num_tets();
  std::unordered_map<std::uint64_t, int> tri_ids;
  tri_ids.reserve(static_cast<size_t>(nt) * 2 + 16);
  T.tris.clear();
  T.tet_tris.assign(static_cast<size_t>(nt), {-1, -1, -1, -1});
  T.tet_tri_sign.assign(static_cast<size_t>(nt), {0, 0, 0, 0});

  for (int t = 0; t < nt; ++t) {
    const auto& tet = T.tets[static_cast<size_t>(t)];
    for (int i = 0; i < 4; ++i)
      for (int k = i + 1; k < 4; ++k)
        if (tet[static_cast<size_t>(i)] == tet[static_cast<size_t>(k)])
          throw std::runtime_error("degenerate tetrahedron with repeated vertex");
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> f = tet_face(tet, i);
      std::array<int, 3> s = f;
      std::sort(s.begin(), s.end());
      const std::uint64_t key = tri_key(f);
      auto it = tri_ids.find(key);
      int id;
      if (it == tri_ids.end()) {
        id = static_cast<int>(T.tris.size());
        tri_ids.emplace(key, id);
        T.tris.push_back(s);
      } else {
        id = it->second;
      }
      T.tet_tris[static_cast<size_t>(t)][static_cast<size_t>(i)] = id;
      T.tet_tri_sign[static_cast<size_t>(t)][static_cast<size_t>(i)] =
          static_cast<std::int8_t>(face_incidence(tet, i));
    }
  }

  // face -> tets, with the closed/oriented checks
  T.tri_tets.assign(T.tris.size(), {-1, -1});
  std::vector<int> sign_sum(T.tris.size(), 0);
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 4; ++i) {
      const int id = T.tet_tris[static_cast<size_t>(t)][static_cast<size_t>(i)];
      auto& pair = T.tri_tets[static_cast<size_t>(id)];
      if (pair[0] < 0) {
        pair[0] = t;
      } else if (pair[1] < 0) {
        pair[1] = t;
      } else {
        non_manifold(T, T.tris[static_cast<size_t>(id)], "lies in more than two tetrahedra");
      }
      sign_sum[static_cast<size_t>(id)] +=
          T.tet_tri_sign[static_cast<size_t>(t)][static_cast<size_t>(i)];
    }
  }
  for (size_t id = 0; id < T.tris.size(); ++id) {
    if (T.tri_tets[id][1] < 0)
      non_manifold(T, T.tris[id], "lies in only one tetrahedron");
    if (sign_sum[id] != 0)
      non_manifold(T, T.tris[id], "is induced with equal signs from both sides");
  }

  // edges
  std::unordered_map<std::uint64_t, int> edge_ids;
  edge_ids.reserve(T.tris.size() * 2 + 16);
  T.edges.clear();
  T.tri_edges.assign(T.tris.size(), {-1, -1, -1});
  T.tri_edge_sign.assign(T.tris.size(), {0, 0, 0});
  for (size_t f = 0; f < T.tris.size(); ++f) {
    const auto& tr = T.tris[f];  // sorted a < b < c
    const std::array<std::array<int, 2>, 3> es{{{tr[1], tr[2]}, {tr[0], tr[2]}, {tr[0], tr[1]}}};
    const std::array<std::int8_t, 3> sg{{+1, -1, +1}};
    for (int i = 0; i < 3; ++i) {
      const auto& e = es[static_cast<size_t>(i)];
      const std::uint64_t key = edge_key(e[0], e[1]);
      auto it = edge_ids.find(key);
      int id;
      if (it == edge_ids.end()) {
        id = static_cast<int>(T.edges.size());
        edge_ids.emplace(key, id);
        T.edges.push_back(e);
      } else {
        id = it->second;
      }
      T.tri_edges[f][static_cast<size_t>(i)] = id;
      T.tri_edge_sign[f][static_cast<size_t>(i)] = sg[static_cast<size_t>(i)];
    }
  }

  T.build_lookup();
}

}  // namespace

int AnnulusGrid::row_of(double r) const {
  int best = 0;
  double err = std::abs(radii[0] - r);
  for (int i = 1; i < rows(); ++i) {
    const double e = std::abs(radii[static_cast<size_t>(i)] - r);
    if (e < err) { err = e; best = i; }
  }
  return best;
}

int BindingGrid::ring_of(double rho) const {
  int best = 0;
  double err = std::abs(rings[0] - rho);
  for (int s = 1; s < n_rings(); ++s) {
    const double e = std::abs(rings[static_cast<size_t>(s)] - rho);
    if (e < err) { err = e; best = s; }
  }
  return best;
}

int Triangulation::ann_vid(int a, int row, int j, int l) const {
  const AnnulusGrid& G = ann.at(static_cast<size_t>(a));
  const int kap = G.kappa.at(static_cast<size_t>(row));
  while (l >= n_theta) { l -= n_theta; j += kap; }
  while (l < 0) { l += n_theta; j -= kap; }
  j %= n_phi;
  if (j < 0) j += n_phi;
  return G.vid[(static_cast<size_t>(row) * static_cast<size_t>(n_phi) +
                static_cast<size_t>(j)) * static_cast<size_t>(n_theta) +
               static_cast<size_t>(l)];
}

int Triangulation::patch_vid(int tube, int k, int m, int l) const {
  const PatchGrid& G = patch.at(static_cast<size_t>(tube));
  l %= n_theta;
  if (l < 0) l += n_theta;
  return G.vid[(static_cast<size_t>(k) * static_cast<size_t>(G.n_t + 1) +
                static_cast<size_t>(m)) * static_cast<size_t>(n_theta) +
               static_cast<size_t>(l)];
}

int Triangulation::core_vid(int b, int k) const {
  const BindingGrid& G = bind.at(static_cast<size_t>(b));
  const int n = G.n_c();
  k %= n;
  if (k < 0) k += n;
  return G.core[static_cast<size_t>(k)];
}

int Triangulation::shell_vid(int b, int s, int k, int m) const {
  const BindingGrid& G = bind.at(static_cast<size_t>(b));
  const int n = G.n_c();
  k %= n;
  if (k < 0) k += n;
  m %= n_theta;
  if (m < 0) m += n_theta;
  return G.shell[(static_cast<size_t>(s) * static_cast<size_t>(n) +
                  static_cast<size_t>(k)) * static_cast<size_t>(n_theta) +
                 static_cast<size_t>(m)];
}

CellRef Triangulation::ann_prism(int a, int band, int layer, int j, int ab) const {
  const AnnulusGrid& G = ann.at(static_cast<size_t>(a));
  return G.prism[((static_cast<size_t>(band) * static_cast<size_t>(n_theta) +
                   static_cast<size_t>(layer)) * static_cast<size_t>(n_phi) +
                  static_cast<size_t>(j)) * 2 + static_cast<size_t>(ab)];
}

int Triangulation::ann_flip(int a, int band, int j) const {
  const AnnulusGrid& G = ann.at(static_cast<size_t>(a));
  return G.flip[static_cast<size_t>(band) * static_cast<size_t>(n_phi) +
                static_cast<size_t>(j)];
}

CellRef Triangulation::patch_prism(int tube, int k, int m, int ab, int layer) const {
  const PatchGrid& G = patch.at(static_cast<size_t>(tube));
  return G.prism[((static_cast<size_t>(k) * static_cast<size_t>(G.n_t) +
                   static_cast<size_t>(m)) * 2 + static_cast<size_t>(ab)) *
                     static_cast<size_t>(n_theta) +
                 static_cast<size_t>(layer)];
}

CellRef Triangulation::bind_prism(int b, int k, int dtri) const {
  const BindingGrid& G = bind.at(static_cast<size_t>(b));
  return G.prism[static_cast<size_t>(k) * G.disk_tris.size() +
                 static_cast<size_t>(dtri)];
}

int Triangulation::edge_id(int u, int v) const {
  auto it = edge_map_.find(edge_key(u, v));
  return it == edge_map_.end() ? -1 : it->second;
}

int Triangulation::tri_id(int a, int b, int c) const {
  auto it = tri_map_.find(tri_key({a, b, c}));
  return it == tri_map_.end() ? -1 : it->second;
}

int Triangulation::tri_between(int tetA, int tetB) const {
  const auto& fa = tet_tris.at(static_cast<size_t>(tetA));
  for (int i = 0; i < 4; ++i) {
    const auto& pair = tri_tets[static_cast<size_t>(fa[static_cast<size_t>(i)])];
    if ((pair[0] == tetA && pair[1] == tetB) || (pair[0] == tetB && pair[1] == tetA))
      return fa[static_cast<size_t>(i)];
  }
  return -1;
}

int Triangulation::exit_sign(int tet, int tri) const {
  const auto& fa = tet_tris.at(static_cast<size_t>(tet));
  for (int i = 0; i < 4; ++i)
    if (fa[static_cast<size_t>(i)] == tri)
      return tet_tri_sign[static_cast<size_t>(tet)][static_cast<size_t>(i)];
  return 0;
}

void Triangulation::build_lookup() {
  edge_map_.clear();
  edge_map_.reserve(edges.size() * 2);
  for (size_t i = 0; i < edges.size(); ++i)
    edge_map_.emplace(edge_key(edges[i][0], edges[i][1]), static_cast<int>(i));
  tri_map_.clear();
  tri_map_.reserve(tris.size() * 2);
  for (size_t i = 0; i < tris.size(); ++i)
    tri_map_.emplace(tri_key(tris[i]), static_cast<int>(i));
}

void Triangulation::validate() const {
  if (euler() != 0) {
    std::ostringstream os;
    os << "Euler characteristic " << euler() << " (expected 0)";
    throw std::runtime_error(os.str());
  }
  // closed oriented: every face in exactly two tets with opposite signs
  std::vector<int> cnt(tris.size(), 0), sum(tris.size(), 0);
  for (size_t t = 0; t < tets.size(); ++t) {
    for (int i = 0; i < 4; ++i) {
      const int f = tet_tris[t][static_cast<size_t>(i)];
      cnt[static_cast<size_t>(f)] += 1;
      sum[static_cast<size_t>(f)] += tet_tri_sign[t][static_cast<size_t>(i)];
    }
  }
  for (size_t f = 0; f < tris.size(); ++f) {
    if (cnt[f] != 2) non_manifold(*this, tris[f], "is not shared by exactly two tets");
    if (sum[f] != 0) non_manifold(*this, tris[f], "has inconsistent orientations");
  }
  // boundary-of-boundary: d2 . d3 = 0 over the integers
  std::map<int, long> acc;
  for (size_t t = 0; t < tets.size(); ++t) {
    acc.clear();
    for (int i = 0; i < 4; ++i) {
      const int f = tet_tris[t][static_cast<size_t>(i)];
      const int sf = tet_tri_sign[t][static_cast<size_t>(i)];
      for (int e = 0; e < 3; ++e)
        acc[tri_edges[static_cast<size_t>(f)][static_cast<size_t>(e)]] +=
            static_cast<long>(sf) *
            tri_edge_sign[static_cast<size_t>(f)][static_cast<size_t>(e)];
    }
    for (const auto& kv : acc)
      if (kv.second != 0)
        throw std::runtime_error("boundary-of-boundary is nonzero on a tetrahedron");
  }
  // d1 . d2 = 0
  for (size_t f = 0; f < tris.size(); ++f) {
    std::map<int, long> a2;
    for (int e = 0; e < 3; ++e) {
      const int id = tri_edges[f][static_cast<size_t>(e)];
      const int sg = tri_edge_sign[f][static_cast<size_t>(e)];
      a2[edges[static_cast<size_t>(id)][0]] -= sg;
      a2[edges[static_cast<size_t>(id)][1]] += sg;
    }
    for (const auto& kv : a2)
      if (kv.second != 0)
        throw std::runtime_error("boundary-of-boundary is nonzero on a face");
  }
}

namespace {

struct ColumnRef {
  int bot = -1, top = -1;
  Vec3 blog{}, tlog{};
};

struct Builder {
  const OpenBookManifold& M;
  int res;
  int n_phi = 0, n_theta = 0;
  double colw = 0.0, depth = 0.2, r_cut = 0.0;
  Triangulation T;
  std::vector<char> pending;  // parallel to T.tets: orientation not final

  std::vector<double> rho_edge;  // per binding
  std::vector<int> tube_ne;      // per tube
  struct FrontData {
    std::vector<double> s0, t, theta;  // indexed by patch column 0..n_e
  };
  std::vector<std::array<FrontData, 2>> fronts;  // per tube, per t_edge

  Builder(const OpenBookManifold& m, int r) : M(m), res(r) {}

  int add_vertex(const MPoint& pos, MeshVertex::Owner ow, int region,
                 std::array<int, 3> addr) {
    MeshVertex v;
    v.pos = pos;
    v.owner = ow;
    v.region = region;
    v.addr = addr;
    const int id = static_cast<int>(T.vertices.size());
    if (id >= (1 << kIdBits))
      throw std::runtime_error("vertex count exceeds the id budget");
    T.vertices.push_back(v);
    return id;
  }

  int add_tet_oriented(std::array<int, 4> v, std::array<Vec3, 4> logical) {
    double d = tet_det(logical);
    if (std::abs(d) < 1e-13) {
      std::ostringstream os;
      os << "degenerate prism cell at " << describe_vertex(T, v[0]);
      throw std::runtime_error(os.str());
    }
    if (d < 0) {
      std::swap(v[2], v[3]);
      std::swap(logical[2], logical[3]);
    }
    T.tets.push_back(v);
    pending.push_back(0);
    return static_cast<int>(T.tets.size()) - 1;
  }

  int add_tet_pending(std::array<int, 4> v) {
    T.tets.push_back(v);
    pending.push_back(1);
    return static_cast<int>(T.tets.size()) - 1;
  }

  // true when the quad over columns (X, Y) takes the diagonal from the
  // bottom of X to the top of Y (the diagonal through the smallest global id)
  static bool quad_dir(const ColumnRef& X, const ColumnRef& Y) {
    const int g = std::min(std::min(X.bot, X.top), std::min(Y.bot, Y.top));
    return g == X.bot || g == Y.top;
  }

  CellRef add_prism(const std::array<ColumnRef, 3>& c,
                    const std::function<MPoint(const Vec3&)>& steiner_pos,
                    int region) {
    CellRef ref;
    ref.first = static_cast<int>(T.tets.size());
    // tournament of quad diagonals
    bool dir01 = quad_dir(c[0], c[1]);
    bool dir02 = quad_dir(c[0], c[2]);
    bool dir12 = quad_dir(c[1], c[2]);
    int order[3] = {-1, -1, -1};
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    bool found = false;
    for (const auto& p : perms) {
      auto before = [&](int x, int y) {
        if (x == 0 && y == 1) return dir01;
        if (x == 1 && y == 0) return !dir01;
        if (x == 0 && y == 2) return dir02;
        if (x == 2 && y == 0) return !dir02;
        if (x == 1 && y == 2) return dir12;
        return !dir12;
      };
      if (before(p[0], p[1]) && before(p[1], p[2]) && before(p[0], p[2])) {
        order[0] = p[0];
        order[1] = p[1];
        order[2] = p[2];
        found = true;
        break;
      }
    }
    if (found) {
      const ColumnRef& P = c[static_cast<size_t>(order[0])];
      const ColumnRef& Q = c[static_cast<size_t>(order[1])];
      const ColumnRef& R = c[static_cast<size_t>(order[2])];
      add_tet_oriented({P.bot, Q.bot, R.bot, R.top}, {P.blog, Q.blog, R.blog, R.tlog});
      add_tet_oriented({P.bot, Q.bot, R.top, Q.top}, {P.blog, Q.blog, R.tlog, Q.tlog});
      add_tet_oriented({P.bot, Q.top, R.top, P.top}, {P.blog, Q.tlog, R.tlog, P.tlog});
    } else {
      // cyclic diagonal pattern: split around an interior Steiner vertex
      Vec3 ctr{0, 0, 0};
      for (const auto& col : c)
        for (int i = 0; i < 3; ++i)
          ctr[static_cast<size_t>(i)] +=
              (col.blog[static_cast<size_t>(i)] + col.tlog[static_cast<size_t>(i)]) / 6.0;
      const int w = add_vertex(steiner_pos(ctr), MeshVertex::Owner::Steiner, region,
                               {-1, -1, -1});
      auto cone = [&](int v0, int v1, int v2, const Vec3& l0, const Vec3& l1,
                      const Vec3& l2) {
        add_tet_oriented({w, v0, v1, v2}, {ctr, l0, l1, l2});
      };
      cone(c[0].bot, c[1].bot, c[2].bot, c[0].blog, c[1].blog, c[2].blog);
      cone(c[0].top, c[1].top, c[2].top, c[0].tlog, c[1].tlog, c[2].tlog);
      const int pair[3][2] = {{0, 1}, {0, 2}, {1, 2}};
      const bool dirs[3] = {dir01, dir02, dir12};
      for (int q = 0; q < 3; ++q) {
        const ColumnRef& X = c[static_cast<size_t>(pair[q][0])];
        const ColumnRef& Y = c[static_cast<size_t>(pair[q][1])];
        if (dirs[q]) {
          cone(X.bot, Y.bot, Y.top, X.blog, Y.blog, Y.tlog);
          cone(X.bot, Y.top, X.top, X.blog, Y.tlog, X.tlog);
        } else {
          cone(X.bot, Y.bot, X.top, X.blog, Y.blog, X.tlog);
          cone(Y.bot, Y.top, X.top, Y.blog, Y.tlog, X.tlog);
        }
      }
    }
    ref.count = static_cast<int>(T.tets.size()) - ref.first;
    return ref;
  }

  void build_params() {
    n_phi = 12 * res;
    n_theta = 4 * res;
    colw = kTwoPi / n_phi;
    T.resolution = res;
    T.n_phi = n_phi;
    T.n_theta = n_theta;
    T.colw = colw;
    if (!M.atlas.tubes.empty()) {
      depth = M.atlas.tubes[0].depth;
      for (const auto& tb : M.atlas.tubes)
        if (std::abs(tb.depth - depth) > 1e-12)
          throw std::invalid_argument("triangulation requires a uniform window depth");
    }
    r_cut = 1.0 - depth;
    T.r_cut = r_cut;
    if (r_cut < 0.735)
      throw std::invalid_argument("window depth leaves no room for the weld row");
    rho_edge.resize(M.bindings.size());
    for (size_t b = 0; b < M.bindings.size(); ++b) {
      const ProfilePair& P = M.bindings[b].profile;
      const double lo = M.glue_lo + 1e-9, hi = M.glue_hi - 1e-9;
      if (!(P.h1(lo) > r_cut && P.h1(hi) < r_cut))
        throw std::invalid_argument("weld depth unreachable in the gluing annulus");
      rho_edge[b] = find_root([&](double x) { return P.h1(x) - r_cut; }, lo, hi);
    }
    tube_ne.resize(M.atlas.tubes.size());
    for (size_t t = 0; t < M.atlas.tubes.size(); ++t) {
      const double L = M.atlas.tubes[t].edge_lambda_length();
      tube_ne[t] = std::max(3, static_cast<int>(std::lround(L / colw)));
    }
    fronts.assign(M.atlas.tubes.size(), {});
  }

  // tube point of the Liouville front of edge (tube, te) started at edge
  // parameter s0, via the gluing map at depth rho_edge
  std::array<double, 3> front_point(int b, int tube, int te, double s0) const {
    const BindingChart& B = M.bindings[static_cast<size_t>(b)];
    const double th = B.edge_theta(tube, te, s0, M.atlas.tubes);
    const MPoint q = glue_binding_to_torus(
        M, binding_point(b, th, rho_edge[static_cast<size_t>(b)], 0.0));
    if (q.chart != MChart::TorusTube || q.index != tube)
      throw std::runtime_error("Liouville front left its tube chart");
    return {q.a, q.b, th};
  }

  void build_fronts() {
    const double z = TubeChart::kZone;
    for (size_t b = 0; b < M.bindings.size(); ++b) {
      const BoundaryCircle& circle = M.bindings[b].circle;
      for (size_t si = 0; si < circle.segs.size(); ++si) {
        const BoundarySeg& seg = circle.segs[si];
        if (seg.is_arc) continue;
        const int tube = seg.tube, te = seg.t_edge;
        const int n_e = tube_ne[static_cast<size_t>(tube)];
        FrontData fd;
        fd.s0.assign(static_cast<size_t>(n_e) + 1, 0.0);
        fd.t.assign(static_cast<size_t>(n_e) + 1, 0.0);
        fd.theta.assign(static_cast<size_t>(n_e) + 1, 0.0);
        // dense monotonicity scan
        const int NS = 64;
        std::vector<double> xs(NS + 1), fs(NS + 1);
        for (int i = 0; i <= NS; ++i) {
          const double x = -z + 1e-7 + (2 * z - 2e-7) * i / NS;
          xs[static_cast<size_t>(i)] = x;
          fs[static_cast<size_t>(i)] =
              front_point(static_cast<int>(b), tube, te, x)[0];
        }
        for (int i = 0; i < NS; ++i)
          if (!(fs[static_cast<size_t>(i)] < fs[static_cast<size_t>(i) + 1]))
            throw std::invalid_argument("Liouville front is not monotone across the tube");
        // end columns: the corners flow exactly to s = -;+1 at depth tau
        fd.s0[0] = -z;
        fd.s0[static_cast<size_t>(n_e)] = z;
        fd.t[0] = static_cast<double>(te);
        fd.t[static_cast<size_t>(n_e)] = static_cast<double>(te);
        const BindingChart& B = M.bindings[b];
        fd.theta[0] = B.edge_theta(tube, te, -z, M.atlas.tubes);
        fd.theta[static_cast<size_t>(n_e)] = B.edge_theta(tube, te, z, M.atlas.tubes);
        for (int k = 1; k < n_e; ++k) {
          const double target = -1.0 + 2.0 * k / n_e;
          // bracket from the scan
          int lo = 0;
          while (lo < NS && fs[static_cast<size_t>(lo) + 1] < target) ++lo;
          const double a = xs[static_cast<size_t>(lo)], c = xs[static_cast<size_t>(lo) + 1];
          const double s0 = find_root(
              [&](double x) {
                return front_point(static_cast<int>(b), tube, te, x)[0] - target;
              },
              a, c);
          const auto p = front_point(static_cast<int>(b), tube, te, s0);
          fd.s0[static_cast<size_t>(k)] = s0;
          fd.t[static_cast<size_t>(k)] = p[1];
          fd.theta[static_cast<size_t>(k)] = p[2];
        }
        fronts[static_cast<size_t>(tube)][static_cast<size_t>(te)] = std::move(fd);
      }
    }
  }

  void build_annuli() {
    const size_t A = M.atlas.annuli.size();
    T.ann.resize(A);
    for (size_t a = 0; a < A; ++a) {
      AnnulusGrid& G = T.ann[a];
      const TwistProfile& tw = M.monodromy.tw[a];
      G.radii.push_back(-r_cut);
      G.kappa.push_back(n_phi);
      G.radii.push_back(-0.73);
      G.kappa.push_back(n_phi);
      for (int k = n_phi - 1; k >= 1; --k) {
        const double target = k * colw;
        const double r = find_root([&](double x) { return tw(x) - target; }, -0.73, 0.73);
        G.radii.push_back(r);
        G.kappa.push_back(k);
      }
      G.radii.push_back(0.73);
      G.kappa.push_back(0);
      G.radii.push_back(r_cut);
      G.kappa.push_back(0);
      for (size_t i = 0; i + 1 < G.radii.size(); ++i)
        if (!(G.radii[i] + 1e-6 < G.radii[i + 1]))
          throw std::runtime_error("annulus grid rows are not strictly ordered");
      const int rows = G.rows();
      G.period.resize(static_cast<size_t>(rows));
      for (int i = 0; i < rows; ++i) {
        PagePoint w;
        w.chart = PagePoint::Chart::Annulus;
        w.index = static_cast<int>(a);
        w.a = G.radii[static_cast<size_t>(i)];
        w.b = 0.0;
        G.period[static_cast<size_t>(i)] = M.fiber_period(w);
        if (!(G.period[static_cast<size_t>(i)] > 0))
          throw std::runtime_error("nonpositive fiber period on a grid row");
      }
      // the weld rows must carry fiber period one (collar normalization)
      if (std::abs(G.period.front() - 1.0) > 1e-8 ||
          std::abs(G.period.back() - 1.0) > 1e-8)
        throw std::runtime_error("weld rows do not have unit fiber period");

      G.vid.assign(static_cast<size_t>(rows) * static_cast<size_t>(n_phi) *
                       static_cast<size_t>(n_theta),
                   -1);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < n_phi; ++j)
          for (int l = 0; l < n_theta; ++l) {
            const double r = G.radii[static_cast<size_t>(i)];
            const double phi = wrap_period(j * colw, kTwoPi);
            const double c = G.period[static_cast<size_t>(i)] * l / n_theta;
            G.vid[(static_cast<size_t>(i) * static_cast<size_t>(n_phi) +
                   static_cast<size_t>(j)) * static_cast<size_t>(n_theta) +
                  static_cast<size_t>(l)] =
                add_vertex(torus_annulus_point(static_cast<int>(a), r, phi, c),
                           MeshVertex::Owner::Annulus, static_cast<int>(a), {i, j, l});
          }
    }
    // cells (grids must be registered in T before using T.ann_vid)
    for (size_t a = 0; a < A; ++a) {
      AnnulusGrid& G = T.ann[a];
      const int rows = G.rows();
      G.prism.assign(static_cast<size_t>(G.bands()) * static_cast<size_t>(n_theta) *
                         static_cast<size_t>(n_phi) * 2,
                     CellRef{});
      G.flip.assign(static_cast<size_t>(G.bands()) * static_cast<size_t>(n_phi), -1);
      auto steiner_pos = [&](const Vec3& c) {
        const double p = M.fiber_period(PagePoint{PagePoint::Chart::Annulus,
                                                  static_cast<int>(a), c[0], 0.0});
        return torus_annulus_point(static_cast<int>(a), c[0],
                                   wrap_period(c[1], kTwoPi), wrap_period(c[2], p));
      };
      for (int i = 0; i + 1 < rows; ++i) {
        const double r0 = G.radii[static_cast<size_t>(i)];
        const double r1 = G.radii[static_cast<size_t>(i) + 1];
        const double p0 = G.period[static_cast<size_t>(i)];
        const double p1 = G.period[static_cast<size_t>(i) + 1];
        const int dk = G.kappa[static_cast<size_t>(i) + 1] - G.kappa[static_cast<size_t>(i)];
        if (dk != 0 && dk != -1)
          throw std::runtime_error("adjacent rows differ by more than one twist column");
        auto col = [&](int row01, int j, int l) {
          ColumnRef c;
          const int rr = i + row01;
          c.bot = T.ann_vid(static_cast<int>(a), rr, j, l);
          c.top = T.ann_vid(static_cast<int>(a), rr, j, l + 1);
          const double r = row01 ? r1 : r0;
          const double p = row01 ? p1 : p0;
          c.blog = {r, j * colw, p * l / n_theta};
          c.tlog = {r, j * colw, p * (l + 1) / n_theta};
          return c;
        };
        for (int l = 0; l < n_theta; ++l)
          for (int j = 0; j < n_phi; ++j) {
            // A-type: (in_j, in_{j+1}, out_{j+1}); B-type: (in_j, out_j, out_{j+1})
            const std::array<ColumnRef, 3> ca{col(0, j, l), col(0, j + 1, l),
                                              col(1, j + 1, l)};
            const std::array<ColumnRef, 3> cb{col(0, j, l), col(1, j, l),
                                              col(1, j + 1, l)};
            const size_t base =
                ((static_cast<size_t>(i) * static_cast<size_t>(n_theta) +
                  static_cast<size_t>(l)) * static_cast<size_t>(n_phi) +
                 static_cast<size_t>(j)) * 2;
            G.prism[base + 0] = add_prism(ca, steiner_pos, static_cast<int>(a));
            G.prism[base + 1] = add_prism(cb, steiner_pos, static_cast<int>(a));
          }
        if (dk == -1) {
          for (int j = 0; j < n_phi; ++j) {
            const int v0 = T.ann_vid(static_cast<int>(a), i, j, 0);
            const int v1 = T.ann_vid(static_cast<int>(a), i, j + 1, 0);
            const int w0 = T.ann_vid(static_cast<int>(a), i + 1, j, 0);
            const int w1 = T.ann_vid(static_cast<int>(a), i + 1, j + 1, 0);
            G.flip[static_cast<size_t>(i) * static_cast<size_t>(n_phi) +
                   static_cast<size_t>(j)] = add_tet_pending({v0, v1, w0, w1});
          }
        }
      }
    }
  }

  // column index of an angle, which must sit on the grid
  int column_of(double phi, const char* what) const {
    const double w = wrap_period(phi, kTwoPi);
    double frac = w / colw;
    int j = static_cast<int>(std::lround(frac));
    if (std::abs(frac - j) > 1e-7) {
      std::ostringstream os;
      os << what << " at angle " << w << " is not aligned with the column grid";
      throw std::invalid_argument(os.str());
    }
    j %= n_phi;
    return j;
  }

  void build_patches() {
    T.patch.resize(M.atlas.tubes.size());
    for (size_t tu = 0; tu < M.atlas.tubes.size(); ++tu) {
      const TubeChart& TC = M.atlas.tubes[tu];
      PatchGrid& G = T.patch[tu];
      G.tube = static_cast<int>(tu);
      G.n_e = tube_ne[tu];
      if (std::abs(TC.width(0) - TC.width(1)) > 1e-12)
        throw std::invalid_argument("tube windows of unequal width");
      const double width = TC.width(0);
      G.n_t = static_cast<int>(std::lround(width / colw));
      if (G.n_t < 1 || std::abs(G.n_t * colw - width) > 1e-9)
        throw std::invalid_argument("window width is not a whole number of columns");
      const FrontData& f0 = fronts[tu][0];
      const FrontData& f1 = fronts[tu][1];
      if (f0.s0.empty() || f1.s0.empty())
        throw std::runtime_error("missing Liouville front for a tube edge");
      G.s.resize(static_cast<size_t>(G.n_e) + 1);
      G.t.assign(static_cast<size_t>(G.n_e) + 1,
                 std::vector<double>(static_cast<size_t>(G.n_t) + 1, 0.0));
      for (int k = 0; k <= G.n_e; ++k) {
        G.s[static_cast<size_t>(k)] = -1.0 + 2.0 * k / G.n_e;
        const double t0 = f0.t[static_cast<size_t>(k)];
        const double t1 = f1.t[static_cast<size_t>(k)];
        for (int m = 0; m <= G.n_t; ++m)
          G.t[static_cast<size_t>(k)][static_cast<size_t>(m)] =
              t0 + (t1 - t0) * m / G.n_t;
      }
      // exact end columns
      for (int m = 0; m <= G.n_t; ++m) {
        G.t[0][static_cast<size_t>(m)] = static_cast<double>(m) / G.n_t;
        G.t[static_cast<size_t>(G.n_e)][static_cast<size_t>(m)] =
            static_cast<double>(m) / G.n_t;
      }
      G.s[0] = -1.0;
      G.s[static_cast<size_t>(G.n_e)] = 1.0;

      {  // check the fiber normalization once per tube
        PagePoint w;
        w.chart = PagePoint::Chart::Tube;
        w.index = static_cast<int>(tu);
        w.a = 0.0;
        w.b = 0.5;
        if (std::abs(M.fiber_period(w) - 1.0) > 1e-8)
          throw std::runtime_error("tube fiber period is not one");
      }

      G.vid.assign((static_cast<size_t>(G.n_e) + 1) * (static_cast<size_t>(G.n_t) + 1) *
                       static_cast<size_t>(n_theta),
                   -1);
      auto slot = [&](int k, int m, int l) -> int& {
        return G.vid[(static_cast<size_t>(k) * static_cast<size_t>(G.n_t + 1) +
                      static_cast<size_t>(m)) * static_cast<size_t>(n_theta) +
                     static_cast<size_t>(l)];
      };
      // end columns alias annulus grid vertices inside the windows
      for (int e = 0; e < 2; ++e) {
        const Window& W = TC.end[e];
        const int k = (e == 0) ? 0 : G.n_e;
        const int row = T.ann[static_cast<size_t>(W.annulus)].row_of(W.side * r_cut);
        for (int m = 0; m <= G.n_t; ++m) {
          const double phi = TC.end_phi(e, static_cast<double>(m) / G.n_t);
          const int j = column_of(phi, "window column");
          for (int l = 0; l < n_theta; ++l)
            slot(k, m, l) = T.ann_vid(W.annulus, row, j, l);
        }
      }
      for (int k = 1; k < G.n_e; ++k)
        for (int m = 0; m <= G.n_t; ++m)
          for (int l = 0; l < n_theta; ++l)
            slot(k, m, l) = add_vertex(
                torus_tube_point(static_cast<int>(tu), G.s[static_cast<size_t>(k)],
                                 G.t[static_cast<size_t>(k)][static_cast<size_t>(m)],
                                 static_cast<double>(l) / n_theta),
                MeshVertex::Owner::Patch, static_cast<int>(tu), {k, m, l});

      // cells
      G.prism.assign(static_cast<size_t>(G.n_e) * static_cast<size_t>(G.n_t) * 2 *
                         static_cast<size_t>(n_theta),
                     CellRef{});
      auto steiner_pos = [&](const Vec3& c) {
        return torus_tube_point(static_cast<int>(tu), c[0], c[1],
                                wrap_period(c[2], 1.0));
      };
      auto col = [&](int k, int m, int l) {
        ColumnRef c;
        c.bot = T.patch_vid(static_cast<int>(tu), k, m, l);
        c.top = T.patch_vid(static_cast<int>(tu), k, m, l + 1);
        const double s = G.s[static_cast<size_t>(k)];
        const double t = G.t[static_cast<size_t>(k)][static_cast<size_t>(m)];
        c.blog = {s, t, static_cast<double>(l) / n_theta};
        c.tlog = {s, t, static_cast<double>(l + 1) / n_theta};
        return c;
      };
      for (int k = 0; k < G.n_e; ++k)
        for (int m = 0; m < G.n_t; ++m)
          for (int l = 0; l < n_theta; ++l) {
            // diagonal (k,m) -- (k+1,m+1)
            const std::array<ColumnRef, 3> ca{col(k, m, l), col(k + 1, m, l),
                                              col(k + 1, m + 1, l)};
            const std::array<ColumnRef, 3> cb{col(k, m, l), col(k + 1, m + 1, l),
                                              col(k, m + 1, l)};
            const size_t base =
                ((static_cast<size_t>(k) * static_cast<size_t>(G.n_t) +
                  static_cast<size_t>(m)) * 2) * static_cast<size_t>(n_theta) +
                static_cast<size_t>(l);
            G.prism[base] = add_prism(ca, steiner_pos, static_cast<int>(tu));
            G.prism[base + static_cast<size_t>(n_theta)] =
                add_prism(cb, steiner_pos, static_cast<int>(tu));
          }
    }
  }

  void build_bindings() {
    T.bind.resize(M.bindings.size());
    for (size_t b = 0; b < M.bindings.size(); ++b) {
      const BindingChart& B = M.bindings[b];
      BindingGrid& G = T.bind[b];
      G.rho_edge = rho_edge[b];
      // meridian rings: refined base set, outermost at rho_edge
      {
        std::vector<double> base{0.15, 0.30, B.profile.r_star,
                                 0.5 * (B.profile.r_star + M.glue_lo), M.glue_lo,
                                 G.rho_edge};
        std::sort(base.begin(), base.end());
        std::vector<double> clean;
        for (double x : base)
          if (clean.empty() || x > clean.back() + 1e-3) clean.push_back(x);
        if (std::abs(clean.back() - G.rho_edge) > 1e-12)
          throw std::runtime_error("weld ring collides with an interior ring");
        G.rings.clear();
        double prev = 0.0;
        for (double x : clean) {
          for (int i = 1; i < res; ++i)
            G.rings.push_back(prev + (x - prev) * i / res);
          G.rings.push_back(x);
          prev = x;
        }
      }
      const int S = G.n_rings();

      // stations around the boundary circle
      const BoundaryCircle& circle = B.circle;
      double off = 0.0;
      for (size_t si = 0; si < circle.segs.size(); ++si) {
        const BoundarySeg& seg = circle.segs[si];
        if (seg.is_arc) {
          const int cnt = static_cast<int>(std::lround(seg.length / colw));
          if (cnt < 1 || std::abs(cnt * colw - seg.length) > 1e-9)
            throw std::invalid_argument("arc length is not a whole number of columns");
          const int jb = column_of(seg.phi_begin, "arc start");
          const int row =
              T.ann[static_cast<size_t>(seg.annulus)].row_of(seg.side * r_cut);
          for (int k = 0; k < cnt; ++k) {
            BindingStation st;
            st.theta = off + k * colw;
            st.seg = static_cast<int>(si);
            st.on_arc = true;
            st.annulus = seg.annulus;
            st.row = row;
            st.j = (jb + seg.side * k % n_phi + n_phi) % n_phi;
            G.stations.push_back(st);
          }
          off += seg.length;
        } else {
          const int tube = seg.tube, te = seg.t_edge;
          const int n_e = tube_ne[static_cast<size_t>(tube)];
          const FrontData& fd = fronts[static_cast<size_t>(tube)][static_cast<size_t>(te)];
          for (int k = 0; k < n_e; ++k) {
            const int colk = (te == 0) ? k : n_e - k;
            BindingStation st;
            st.seg = static_cast<int>(si);
            if (k == 0) {
              // corner: an annulus vertex at the window-strip corner column
              const int e = (colk == 0) ? 0 : 1;
              const Window& W = M.atlas.tubes[static_cast<size_t>(tube)].end[e];
              st.theta = off;
              st.on_arc = true;
              st.annulus = W.annulus;
              st.row = T.ann[static_cast<size_t>(W.annulus)].row_of(W.side * r_cut);
              st.j = column_of(
                  M.atlas.tubes[static_cast<size_t>(tube)].end_phi(e, te),
                  "window corner");
            } else {
              st.theta = fd.theta[static_cast<size_t>(colk)];
              st.on_arc = false;
              st.tube = tube;
              st.patch_col = colk;
              st.patch_row = (te == 0) ? 0 : T.patch[static_cast<size_t>(tube)].n_t;
            }
            G.stations.push_back(st);
          }
          off += seg.lambda_length;
        }
      }
      if (std::abs(off - B.length) > 1e-6)
        throw std::runtime_error("station walk does not close up around the binding");
      for (size_t k = 0; k + 1 < G.stations.size(); ++k)
        if (!(G.stations[k].theta + 1e-9 < G.stations[k + 1].theta))
          throw std::runtime_error("binding stations are not strictly ordered");
      const int n_c = G.n_c();

      // vertices: core and interior rings; the outer ring is aliased
      G.core.resize(static_cast<size_t>(n_c));
      for (int k = 0; k < n_c; ++k)
        G.core[static_cast<size_t>(k)] =
            add_vertex(binding_point(static_cast<int>(b),
                                     G.stations[static_cast<size_t>(k)].theta, 0.0, 0.0),
                       MeshVertex::Owner::Core, static_cast<int>(b), {k, 0, 0});
      G.shell.assign(static_cast<size_t>(S) * static_cast<size_t>(n_c) *
                         static_cast<size_t>(n_theta),
                     -1);
      auto slot = [&](int s, int k, int m) -> int& {
        return G.shell[(static_cast<size_t>(s) * static_cast<size_t>(n_c) +
                        static_cast<size_t>(k)) * static_cast<size_t>(n_theta) +
                       static_cast<size_t>(m)];
      };
      for (int s = 0; s + 1 < S; ++s)
        for (int k = 0; k < n_c; ++k)
          for (int m = 0; m < n_theta; ++m)
            slot(s, k, m) = add_vertex(
                canonicalize(M, binding_point(
                                    static_cast<int>(b),
                                    G.stations[static_cast<size_t>(k)].theta,
                                    G.rings[static_cast<size_t>(s)],
                                    kTwoPi * m / n_theta)),
                MeshVertex::Owner::Shell, static_cast<int>(b), {s, k, m});
      for (int k = 0; k < n_c; ++k) {
        const BindingStation& st = G.stations[static_cast<size_t>(k)];
        for (int m = 0; m < n_theta; ++m)
          slot(S - 1, k, m) = st.on_arc
                                  ? T.ann_vid(st.annulus, st.row, st.j, m)
                                  : T.patch_vid(st.tube, st.patch_col, st.patch_row, m);
      }

      // weld consistency: the glue image of each station at the weld depth
      // must coincide with the aliased vertex
      for (int k = 0; k < n_c; ++k) {
        const BindingStation& st = G.stations[static_cast<size_t>(k)];
        const MPoint img = glue_binding_to_torus(
            M, binding_point(static_cast<int>(b), st.theta, G.rho_edge, 0.0));
        const MPoint& ref = T.vertices[static_cast<size_t>(slot(S - 1, k, 0))].pos;
        if (img.chart != ref.chart || img.index != ref.index)
          throw std::runtime_error("weld station landed in the wrong chart");
        const double da = std::abs(img.a - ref.a);
        const double db = st.on_arc ? std::abs(wrap_centered(img.b - ref.b, kTwoPi))
                                    : std::abs(img.b - ref.b);
        if (da > 2e-5 || db > 2e-5)
          throw std::runtime_error("weld station does not match its aliased vertex");
      }

      // meridian disk triangulation
      G.disk_tris.clear();
      auto dv = [&](int s, int m) { return 1 + s * n_theta + ((m % n_theta + n_theta) % n_theta); };
      for (int m = 0; m < n_theta; ++m)
        G.disk_tris.push_back({0, dv(0, m), dv(0, m + 1)});
      for (int s = 0; s + 1 < S; ++s)
        for (int m = 0; m < n_theta; ++m) {
          G.disk_tris.push_back({dv(s, m), dv(s + 1, m), dv(s + 1, m + 1)});
          G.disk_tris.push_back({dv(s, m), dv(s + 1, m + 1), dv(s, m + 1)});
        }

      // solid-torus prisms along the binding circle
      G.prism.assign(static_cast<size_t>(n_c) * G.disk_tris.size(), CellRef{});
      auto steiner_pos = [&](const Vec3& c) {
        const double rho = std::hypot(c[1], c[2]);
        const double phi = wrap_period(std::atan2(c[2], c[1]), kTwoPi);
        return canonicalize(
            M, binding_point(static_cast<int>(b),
                             wrap_period(c[0], B.length), rho, phi));
      };
      auto disk_vid = [&](int k, int d) {
        if (d == 0) return T.core_vid(static_cast<int>(b), k);
        const int s = (d - 1) / n_theta;
        const int m = (d - 1) % n_theta;
        return T.shell_vid(static_cast<int>(b), s, k, m);
      };
      auto disk_xy = [&](int d) -> std::array<double, 2> {
        if (d == 0) return {0.0, 0.0};
        const int s = (d - 1) / n_theta;
        const int m = (d - 1) % n_theta;
        const double rho = G.rings[static_cast<size_t>(s)];
        const double ang = kTwoPi * m / n_theta;
        return {rho * std::cos(ang), rho * std::sin(ang)};
      };
      for (int k = 0; k < n_c; ++k) {
        const double th0 = G.stations[static_cast<size_t>(k)].theta;
        const double th1 = (k + 1 < n_c) ? G.stations[static_cast<size_t>(k) + 1].theta
                                         : B.length + G.stations[0].theta;
        for (size_t d = 0; d < G.disk_tris.size(); ++d) {
          std::array<ColumnRef, 3> cols;
          for (int c = 0; c < 3; ++c) {
            const int dvx = G.disk_tris[d][static_cast<size_t>(c)];
            const auto xy = disk_xy(dvx);
            ColumnRef cr;
            cr.bot = disk_vid(k, dvx);
            cr.top = disk_vid((k + 1) % n_c, dvx);
            cr.blog = {th0, xy[0], xy[1]};
            cr.tlog = {th1, xy[0], xy[1]};
            cols[static_cast<size_t>(c)] = cr;
          }
          G.prism[static_cast<size_t>(k) * G.disk_tris.size() + d] =
              add_prism(cols, steiner_pos, static_cast<int>(b));
        }
      }
    }
  }

  // Resolve the orientation of flat flip tets from their straight neighbors.
  void resolve_pending() {
    std::unordered_map<std::uint64_t, std::array<int, 2>> face_map;
    face_map.reserve(T.tets.size() * 2 + 16);
    for (int t = 0; t < T.num_tets(); ++t)
      for (int i = 0; i < 4; ++i) {
        const std::uint64_t key = tri_key(tet_face(T.tets[static_cast<size_t>(t)], i));
        auto it = face_map.find(key);
        if (it == face_map.end()) {
          face_map.emplace(key, std::array<int, 2>{t, -1});
        } else if (it->second[1] < 0) {
          it->second[1] = t;
        } else {
          non_manifold(T, T.tris.empty() ? tet_face(T.tets[static_cast<size_t>(t)], i)
                                         : tet_face(T.tets[static_cast<size_t>(t)], i),
                       "lies in more than two tetrahedra");
        }
      }
    for (int t = 0; t < T.num_tets(); ++t) {
      if (!pending[static_cast<size_t>(t)]) continue;
      bool done = false;
      for (int i = 0; i < 4 && !done; ++i) {
        const std::uint64_t key = tri_key(tet_face(T.tets[static_cast<size_t>(t)], i));
        const auto& pr = face_map.at(key);
        const int q = (pr[0] == t) ? pr[1] : pr[0];
        if (q < 0 || pending[static_cast<size_t>(q)]) continue;
        // locate the face inside q
        int iq = -1;
        for (int u = 0; u < 4; ++u)
          if (tri_key(tet_face(T.tets[static_cast<size_t>(q)], u)) == key) iq = u;
        const int sq = face_incidence(T.tets[static_cast<size_t>(q)], iq);
        const int sp = face_incidence(T.tets[static_cast<size_t>(t)], i);
        if (sp == sq)
          std::swap(T.tets[static_cast<size_t>(t)][2], T.tets[static_cast<size_t>(t)][3]);
        pending[static_cast<size_t>(t)] = 0;
        done = true;
      }
      if (!done)
        throw std::runtime_error("a flip tetrahedron has no oriented neighbor");
    }
  }

  Triangulation run() {
    build_params();
    build_fronts();
    build_annuli();
    build_patches();
    build_bindings();
    resolve_pending();
    build_tables(T);
    T.validate();
    return std::move(T);
  }
};

}  // namespace

Triangulation triangulate(const OpenBookManifold& M, int resolution) {
  if (resolution < 1) throw std::invalid_argument("resolution must be at least 1");
  Builder B(M, resolution);
  return B.run();
}

Triangulation make_complex(int num_vertices,
                           const std::vector<std::array<int, 4>>& tets) {
  Triangulation T;
  T.vertices.resize(static_cast<size_t>(num_vertices));
  T.tets = tets;
  if (T.tets.empty()) throw std::invalid_argument("empty complex");
  // orientation propagation from tets[0]
  std::unordered_map<std::uint64_t, std::array<int, 2>> face_map;
  for (int t = 0; t < T.num_tets(); ++t)
    for (int i = 0; i < 4; ++i) {
      const std::uint64_t key = tri_key(tet_face(T.tets[static_cast<size_t>(t)], i));
      auto it = face_map.find(key);
      if (it == face_map.end())
        face_map.emplace(key, std::array<int, 2>{t, -1});
      else if (it->second[1] < 0)
        it->second[1] = t;
      else
        throw std::runtime_error("non-manifold gluing: a face lies in more than two tets");
    }
  std::vector<char> oriented(tets.size(), 0);
  std::queue<int> q;
  oriented[0] = 1;
  q.push(0);
  while (!q.empty()) {
    const int t = q.front();
    q.pop();
    for (int i = 0; i < 4; ++i) {
      const std::uint64_t key = tri_key(tet_face(T.tets[static_cast<size_t>(t)], i));
      const auto& pr = face_map.at(key);
      const int u = (pr[0] == t) ? pr[1] : pr[0];
      if (u < 0) throw std::runtime_error("complex is not closed");
      if (oriented[static_cast<size_t>(u)]) continue;
      int iu = -1;
      for (int x = 0; x < 4; ++x)
        if (tri_key(tet_face(T.tets[static_cast<size_t>(u)], x)) == key) iu = x;
      const int st = face_incidence(T.tets[static_cast<size_t>(t)], i);
      const int su = face_incidence(T.tets[static_cast<size_t>(u)], iu);
      if (st == su)
        std::swap(T.tets[static_cast<size_t>(u)][2], T.tets[static_cast<size_t>(u)][3]);
      oriented[static_cast<size_t>(u)] = 1;
      q.push(u);
    }
  }
  for (char c : oriented)
    if (!c) throw std::runtime_error("complex is not connected");
  build_tables(T);
  return T;
}

}  // namespace reebbook
