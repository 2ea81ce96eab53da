#include "csmom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "csmom/physics.hpp"

namespace csmom {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("mesh: " + msg);
}

}  // namespace

double Mesh::signed_volume() const {
  double v = 0.0;
  for (const auto& t : triangles) {
    const auto& a = vertices[t[0]];
    const auto& b = vertices[t[1]];
    const auto& c = vertices[t[2]];
    v += a.dot(b.cross(c));
  }
  return v / 6.0;
}

Mesh finalize_mesh(std::vector<Eigen::Vector3d> vertices,
                   std::vector<std::array<int, 3>> triangles) {
  Mesh m;
  m.vertices = std::move(vertices);
  m.triangles = std::move(triangles);

  const int nv = m.vertex_count();
  const int nt = m.triangle_count();
  if (nv < 4 || nt < 4) fail("too few vertices or triangles for a closed surface");

  std::set<std::array<int, 3>> seen;
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv) fail("triangle vertex index out of range");
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) fail("degenerate triangle");
    std::array<int, 3> key = t;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) fail("duplicate triangle");
  }

  // undirected edge -> incident triangles
  std::map<std::pair<int, int>, std::vector<int>> edge_tris;
  for (int ti = 0; ti < nt; ++ti) {
    const auto& t = m.triangles[ti];
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      edge_tris[{std::min(a, b), std::max(a, b)}].push_back(ti);
    }
  }
  for (const auto& [e, ts] : edge_tris) {
    if (ts.size() != 2) {
      fail("edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
           ") shared by " + std::to_string(ts.size()) +
           " triangles; surface is not a closed 2-manifold");
    }
  }

  // Orientation propagation over the dual graph. Two consistently wound
  // neighbors traverse their shared edge in opposite directions.
  std::vector<int> state(nt, 0);  // 0 unknown, 1 keep, -1 flip
  std::deque<int> queue;
  state[0] = 1;
  queue.push_back(0);
  int reached = 0;
  auto directed_in = [&m](int ti, int a, int b) {
    const auto& t = m.triangles[ti];
    for (int k = 0; k < 3; ++k) {
      if (t[k] == a && t[(k + 1) % 3] == b) return true;
    }
    return false;
  };
  while (!queue.empty()) {
    int ti = queue.front();
    queue.pop_front();
    ++reached;
    const auto& t = m.triangles[ti];
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      const auto& ts = edge_tris[{std::min(a, b), std::max(a, b)}];
      int other = ts[0] == ti ? ts[1] : ts[0];
      // direction of this edge in ti after applying its state
      bool fwd = state[ti] == 1 ? true : false;  // (a,b) as stored
      int ea = fwd ? a : b, eb = fwd ? b : a;
      // consistent neighbor must traverse (eb, ea)
      int want = directed_in(other, eb, ea) ? 1 : -1;
      if (state[other] == 0) {
        state[other] = want;
        queue.push_back(other);
      } else if (state[other] != want) {
        fail("orientation conflict; surface is not orientable");
      }
    }
  }
  if (reached != nt) fail("surface is not connected");

  const int ne = static_cast<int>(edge_tris.size());
  if (nv - ne + nt != 2) {
    fail("Euler characteristic V-E+F = " + std::to_string(nv - ne + nt) +
         ", expected 2");
  }

  for (int ti = 0; ti < nt; ++ti) {
    if (state[ti] == -1) std::swap(m.triangles[ti][1], m.triangles[ti][2]);
  }
  if (m.signed_volume() < 0.0) {
    for (auto& t : m.triangles) std::swap(t[1], t[2]);
  }
  if (m.signed_volume() <= 0.0) fail("non-positive enclosed volume");

  m.areas.resize(nt);
  m.normals.resize(nt);
  m.centroids.resize(nt);
  for (int ti = 0; ti < nt; ++ti) {
    const auto& t = m.triangles[ti];
    const auto& a = m.vertices[t[0]];
    const auto& b = m.vertices[t[1]];
    const auto& c = m.vertices[t[2]];
    Eigen::Vector3d cr = (b - a).cross(c - a);
    double n2 = cr.norm();
    if (n2 <= 0.0) fail("zero-area triangle");
    m.areas[ti] = 0.5 * n2;
    m.normals[ti] = cr / n2;
    m.centroids[ti] = (a + b + c) / 3.0;
  }

  // edges, lexicographic by (lo, hi); plus triangle traverses lo -> hi
  m.edges.reserve(ne);
  for (const auto& [e, ts] : edge_tris) {
    Mesh::Edge edge;
    edge.v0 = e.first;
    edge.v1 = e.second;
    edge.tri_plus = edge.tri_minus = -1;
    for (int ti : ts) {
      if (directed_in(ti, e.first, e.second)) {
        edge.tri_plus = ti;
      } else {
        edge.tri_minus = ti;
      }
    }
    if (edge.tri_plus < 0 || edge.tri_minus < 0) fail("inconsistent edge orientation");
    edge.length = (m.vertices[e.second] - m.vertices[e.first]).norm();
    m.edges.push_back(edge);
  }
  double sum = 0.0;
  for (const auto& e : m.edges) sum += e.length;
  m.mean_edge_length = sum / static_cast<double>(ne);
  return m;
}

Mesh gen_cube(double edge_len, int divisions) {
  if (edge_len <= 0.0) fail("gen_cube: edge_len must be positive");
  if (divisions < 1) fail("gen_cube: divisions must be >= 1");
  const int d = divisions;
  std::map<std::array<int, 3>, int> index;
  std::vector<Eigen::Vector3d> verts;
  auto vid = [&](int i, int j, int k) {
    auto it = index.find({i, j, k});
    if (it != index.end()) return it->second;
    int id = static_cast<int>(verts.size());
    index[{i, j, k}] = id;
    double h = edge_len;
    verts.emplace_back(h * (static_cast<double>(i) / d - 0.5),
                       h * (static_cast<double>(j) / d - 0.5),
                       h * (static_cast<double>(k) / d - 0.5));
    return id;
  };

  // (u,v) -> lattice coords per face; tangent order chosen so u x v is outward
  using FaceMap = std::array<int, 3> (*)(int, int, int);
  static const FaceMap faces[6] = {
      [](int u, int v, int) { return std::array<int, 3>{v, u, 0}; },    // z=0, -z
      [](int u, int v, int d) { return std::array<int, 3>{u, v, d}; },  // z=d, +z
      [](int u, int v, int) { return std::array<int, 3>{u, 0, v}; },    // y=0, -y
      [](int u, int v, int d) { return std::array<int, 3>{v, d, u}; },  // y=d, +y
      [](int u, int v, int) { return std::array<int, 3>{0, v, u}; },    // x=0, -x
      [](int u, int v, int d) { return std::array<int, 3>{d, u, v}; },  // x=d, +x
  };

  std::vector<std::array<int, 3>> tris;
  for (const auto& f : faces) {
    for (int u = 0; u < d; ++u) {
      for (int v = 0; v < d; ++v) {
        auto p00 = f(u, v, d), p10 = f(u + 1, v, d);
        auto p01 = f(u, v + 1, d), p11 = f(u + 1, v + 1, d);
        int a = vid(p00[0], p00[1], p00[2]);
        int b = vid(p10[0], p10[1], p10[2]);
        int c = vid(p11[0], p11[1], p11[2]);
        int e = vid(p01[0], p01[1], p01[2]);
        tris.push_back({a, b, c});
        tris.push_back({a, c, e});
      }
    }
  }
  return finalize_mesh(std::move(verts), std::move(tris));
}

Mesh gen_icosphere(double diameter, int subdivisions) {
  if (diameter <= 0.0) fail("gen_icosphere: diameter must be positive");
  if (subdivisions < 0) fail("gen_icosphere: subdivisions must be >= 0");
  const double radius = 0.5 * diameter;
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;

  std::vector<Eigen::Vector3d> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v = radius * v.normalized();

  std::vector<std::array<int, 3>> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      int id = static_cast<int>(verts.size());
      verts.push_back(radius * (0.5 * (verts[a] + verts[b])).normalized());
      midpoint[key] = id;
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(tris.size() * 4);
    for (const auto& tr : tris) {
      int ab = mid(tr[0], tr[1]);
      int bc = mid(tr[1], tr[2]);
      int ca = mid(tr[2], tr[0]);
      next.push_back({tr[0], ab, ca});
      next.push_back({tr[1], bc, ab});
      next.push_back({tr[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  return finalize_mesh(std::move(verts), std::move(tris));
}

Mesh load_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");

  auto next_line = [&in](std::string& line) {
    while (std::getline(in, line)) {
      auto h = line.find('#');
      if (h != std::string::npos) line.erase(h);
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  };

  std::string line;
  if (!next_line(line)) fail("'" + path + "': empty file");
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != "OFF") fail("'" + path + "': missing OFF header");
  }
  if (!next_line(line)) fail("'" + path + "': missing counts line");
  long nv = 0, nf = 0, ne = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> nv >> nf >> ne)) fail("'" + path + "': malformed counts line");
  }
  if (nv <= 0 || nf <= 0) fail("'" + path + "': non-positive counts");

  std::vector<Eigen::Vector3d> verts;
  verts.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!next_line(line)) fail("'" + path + "': truncated vertex list");
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x >> y >> z)) fail("'" + path + "': malformed vertex line");
    verts.emplace_back(x, y, z);
  }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(nf);
  for (long i = 0; i < nf; ++i) {
    if (!next_line(line)) fail("'" + path + "': truncated face list");
    std::istringstream ss(line);
    int cnt, a, b, c;
    if (!(ss >> cnt >> a >> b >> c) || cnt != 3) {
      fail("'" + path + "': only triangular faces are supported");
    }
    tris.push_back({a, b, c});
  }
  return finalize_mesh(std::move(verts), std::move(tris));
}

void save_off(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write '" + path + "'");
  out << "OFF\n";
  out << mesh.vertex_count() << " " << mesh.triangle_count() << " "
      << mesh.edge_count() << "\n";
  out.precision(17);
  for (const auto& v : mesh.vertices) {
    out << v.x() << " " << v.y() << " " << v.z() << "\n";
  }
  for (const auto& t : mesh.triangles) {
    out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  }
  if (!out) fail("write failed for '" + path + "'");
}

MeshQualityReport mesh_quality(const Mesh& mesh, double k0) {
  MeshQualityReport r;
  r.vertex_count = mesh.vertex_count();
  r.triangle_count = mesh.triangle_count();
  r.edge_count = mesh.edge_count();
  r.min_edge = r.max_edge = mesh.edges.front().length;
  for (const auto& e : mesh.edges) {
    r.min_edge = std::min(r.min_edge, e.length);
    r.max_edge = std::max(r.max_edge, e.length);
  }
  r.mean_edge = mesh.mean_edge_length;
  if (k0 > 0.0) {
    double lambda = 2.0 * pi / k0;
    r.min_edge_over_lambda = r.min_edge / lambda;
    r.max_edge_over_lambda = r.max_edge / lambda;
    r.mean_edge_over_lambda = r.mean_edge / lambda;
  }
  return r;
}

void write_quality_csv(const MeshQualityReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write '" + path + "'");
  out.precision(17);
  out << "metric,value\n";
  out << "vertex_count," << r.vertex_count << "\n";
  out << "triangle_count," << r.triangle_count << "\n";
  out << "edge_count," << r.edge_count << "\n";
  out << "min_edge_m," << r.min_edge << "\n";
  out << "max_edge_m," << r.max_edge << "\n";
  out << "mean_edge_m," << r.mean_edge << "\n";
  out << "min_edge_over_lambda," << r.min_edge_over_lambda << "\n";
  out << "max_edge_over_lambda," << r.max_edge_over_lambda << "\n";
  out << "mean_edge_over_lambda," << r.mean_edge_over_lambda << "\n";
}

}  // namespace csmom
