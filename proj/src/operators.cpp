#include "csmom/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "csmom/potential_integrals.hpp"
#include "csmom/quadrature.hpp"

namespace csmom {
namespace {

using Eigen::Vector3d;

// below k0*R the remainder kernels switch to series to avoid cancellation
constexpr double kSeriesCut = 0.05;

cplx expj(double x) { return {std::cos(x), -std::sin(x)}; }

// (e^{-jkR} - 1)/(4 pi R); order 2 also removes the constant -jk/(4 pi).
// Finite at R = 0 (limit -jk/(4 pi), respectively 0).
cplx smooth_g(double R, double k0, int order) {
  double x = k0 * R;
  if (x < kSeriesCut) {
    cplx sum = 0.0;
    cplx term = -jj * k0;  // (-jk)^p R^{p-1} / p! starting at p = 1
    for (int p = 1; p <= 9; ++p) {
      if (order == 1 || p >= 2) sum += term;
      term *= -jj * k0 * R / double(p + 1);
    }
    return sum / (4.0 * pi);
  }
  cplx num = expj(x) - 1.0;
  if (order == 2) num += jj * x;
  return num / (4.0 * pi * R);
}

// grad_r of the order-1 remainder is (r - r') * this; bounded in the product
// since the factor grows only like 1/R
cplx smooth_grad_scale(double R, double k0) {
  if (R == 0.0) return 0.0;  // only reachable on the skipped self pair
  double x = k0 * R;
  double denom = 4.0 * pi * R * R * R;
  if (x < kSeriesCut) {
    cplx sum = 0.0;
    cplx pw = -0.5 * x * x;  // (-jx)^2 / 2!
    for (int p = 2; p <= 10; ++p) {
      sum += double(p - 1) * pw;
      pw *= -jj * x / double(p + 1);
    }
    return sum / denom;
  }
  return (1.0 - (1.0 + jj * x) * expj(x)) / denom;
}

// grad_r of the full kernel is (r - r') * this
cplx full_grad_scale(double R, double k0) {
  double x = k0 * R;
  return -(1.0 + jj * x) * expj(x) / (4.0 * pi * R * R * R);
}

struct LocalData {
  double sl;  // sign * edge length
  Vector3d free_v;
};

struct TriData {
  Vector3d v0, v1, v2;
  Vector3d normal, centroid;
  double area;
  std::array<LocalData, 3> fn;
  std::array<int, 3> global;
};

// Graded recursive subdivision of the test triangle for the near-pair outer
// integrals. Cells within refine_ratio of a driver segment subdivide to
// max_depth; with `composite` set, emitted cells still near a segment get two
// extra uniform levels under the fine rule, which resolves the logarithmic
// growth of the static gradient potential toward a shared edge or vertex.
struct Grading {
  int floor_depth = 2;
  int max_depth = 5;
  int nseg = 0;
  double refine_ratio = 1e-9;  // ~0 means refine only cells touching a driver
  bool composite = false;
  std::array<Vector3d, 3> p, q;
};

double seg_distance(const Vector3d& x, const Vector3d& p, const Vector3d& q) {
  Vector3d d = q - p;
  double len2 = d.squaredNorm();
  double t = len2 > 0.0 ? std::clamp((x - p).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (x - p - t * d).norm();
}

double cell_driver_distance(const Vector3d& a, const Vector3d& b,
                            const Vector3d& c, const Grading& g) {
  double dist = std::numeric_limits<double>::max();
  for (int s = 0; s < g.nseg; ++s) {
    dist = std::min({dist, seg_distance(a, g.p[s], g.q[s]),
                     seg_distance(b, g.p[s], g.q[s]),
                     seg_distance(c, g.p[s], g.q[s])});
  }
  return dist;
}

template <typename F>
void emit_uniform(const Vector3d& a, const Vector3d& b, const Vector3d& c,
                  int levels, const std::vector<TriQuadPoint>& rule,
                  const F& emit) {
  if (levels > 0) {
    Vector3d ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
    emit_uniform(a, ab, ca, levels - 1, rule, emit);
    emit_uniform(b, bc, ab, levels - 1, rule, emit);
    emit_uniform(c, ca, bc, levels - 1, rule, emit);
    emit_uniform(ab, bc, ca, levels - 1, rule, emit);
    return;
  }
  double area = 0.5 * (b - a).cross(c - a).norm();
  for (const auto& qp : rule) {
    emit(map_to_triangle(qp, a, b, c), qp.w * area);
  }
}

template <typename F>
void outer_cells(const Vector3d& a, const Vector3d& b, const Vector3d& c,
                 int depth, const Grading& g,
                 const std::vector<TriQuadPoint>& base_rule,
                 const std::vector<TriQuadPoint>& fine_rule, const F& emit) {
  double diam = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  double dist = -1.0;
  bool refine = depth < g.floor_depth;
  if (!refine && depth < g.max_depth && g.nseg > 0) {
    dist = cell_driver_distance(a, b, c, g);
    refine = dist < g.refine_ratio * diam;
  }
  if (refine) {
    Vector3d ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
    outer_cells(a, ab, ca, depth + 1, g, base_rule, fine_rule, emit);
    outer_cells(b, bc, ab, depth + 1, g, base_rule, fine_rule, emit);
    outer_cells(c, ca, bc, depth + 1, g, base_rule, fine_rule, emit);
    outer_cells(ab, bc, ca, depth + 1, g, base_rule, fine_rule, emit);
    return;
  }
  if (g.composite) {
    if (dist < 0.0) dist = cell_driver_distance(a, b, c, g);
    if (dist < 1.5 * diam) {
      emit_uniform(a, b, c, 2, fine_rule, emit);
      return;
    }
  }
  emit_uniform(a, b, c, 0, base_rule, emit);
}

enum class Contact { self, edge, vertex, separated };

Contact classify_contact(const Mesh& mesh, int tri_a, int tri_b,
                         std::array<Vector3d, 2>& shared) {
  if (tri_a == tri_b) return Contact::self;
  const auto& ia = mesh.triangles[tri_a];
  const auto& ib = mesh.triangles[tri_b];
  int count = 0;
  for (int i = 0; i < 3 && count < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (ia[i] == ib[j]) {
        shared[count++] = mesh.vertices[ia[i]];
        break;
      }
    }
  }
  if (count == 2) return Contact::edge;
  if (count == 1) return Contact::vertex;
  return Contact::separated;
}

Grading static_grading(Contact contact, const TriData& ta, const TriData& tb,
                       const std::array<Vector3d, 2>& shared) {
  Grading g;
  switch (contact) {
    case Contact::self:
      g.nseg = 3;
      g.p = {ta.v0, ta.v1, ta.v2};
      g.q = {ta.v1, ta.v2, ta.v0};
      break;
    case Contact::edge:
      g.nseg = 1;
      g.p[0] = shared[0];
      g.q[0] = shared[1];
      g.composite = true;
      break;
    case Contact::vertex:
      g.nseg = 1;
      g.p[0] = g.q[0] = shared[0];
      g.composite = true;
      break;
    case Contact::separated:
      // proximity-driven refinement toward the source triangle
      g.nseg = 3;
      g.p = {tb.v0, tb.v1, tb.v2};
      g.q = {tb.v1, tb.v2, tb.v0};
      g.refine_ratio = 1.2;
      break;
  }
  return g;
}

Grading smooth_grading(Contact contact, const TriData& ta,
                       const std::array<Vector3d, 2>& shared) {
  Grading g;
  g.max_depth = 4;
  if (contact == Contact::self) {
    g.nseg = 3;
    g.p = {ta.v0, ta.v1, ta.v2};
    g.q = {ta.v1, ta.v2, ta.v0};
  } else {
    g.nseg = 1;
    g.p[0] = shared[0];
    g.q[0] = contact == Contact::edge ? shared[1] : shared[0];
  }
  return g;
}

void validate(double k0, const QuadratureConfig& quad) {
  if (k0 <= 0.0) throw std::invalid_argument("assemble: k0 must be positive");
  if (quad.near_threshold_factor < 0.0) {
    throw std::invalid_argument("assemble: near threshold must be >= 0");
  }
  if (quad.extraction_order != 1 && quad.extraction_order != 2) {
    throw std::invalid_argument("assemble: extraction order must be 1 or 2");
  }
  triangle_rule(quad.far_points);  // throws on unsupported rule sizes
  triangle_rule(quad.near_points);
}

}  // namespace

cplx greens(const Vector3d& r, const Vector3d& rp, double k0) {
  double R = (r - rp).norm();
  if (R == 0.0) {
    throw std::invalid_argument("greens: coincident points need the singular path");
  }
  return expj(k0 * R) / (4.0 * pi * R);
}

OperatorSet assemble_operators(const RwgBasis& basis, double k0,
                               const QuadratureConfig& quad,
                               const AssemblyRequest& req) {
  validate(k0, quad);
  const Mesh& mesh = basis.mesh();
  const int n = basis.size();
  const int m = mesh.triangle_count();
  const bool want_k = req.want_K_beta || req.want_K_nxbeta;

  OperatorSet out;
  if (req.want_T) out.T = Eigen::MatrixXcd::Zero(n, n);
  if (req.want_K_beta) out.K_beta = Eigen::MatrixXcd::Zero(n, n);
  if (req.want_K_nxbeta) out.K_nxbeta = Eigen::MatrixXcd::Zero(n, n);
  if (!req.want_T && !want_k) return out;

  std::vector<TriData> tri(m);
  for (int t = 0; t < m; ++t) {
    const auto& idx = mesh.triangles[t];
    tri[t].v0 = mesh.vertices[idx[0]];
    tri[t].v1 = mesh.vertices[idx[1]];
    tri[t].v2 = mesh.vertices[idx[2]];
    tri[t].normal = mesh.normals[t];
    tri[t].centroid = mesh.centroids[t];
    tri[t].area = mesh.areas[t];
    const auto& fns = basis.triangle_functions(t);
    for (int i = 0; i < 3; ++i) {
      tri[t].fn[i].sl = fns[i].sign * fns[i].length;
      tri[t].fn[i].free_v = mesh.vertices[fns[i].free_vertex];
      tri[t].global[i] = fns[i].basis;
    }
  }

  const auto& far_rule = triangle_rule(quad.far_points);
  const auto& near_rule = triangle_rule(quad.near_points);
  const auto& cell_rule = triangle_rule(7);
  const auto& fine_rule = triangle_rule(12);
  struct WPoint {
    Vector3d p;
    double w;
  };
  std::vector<std::vector<Vector3d>> far_pts(m), fine_pts(m);
  std::vector<std::vector<WPoint>> near_wpts(m);
  for (int t = 0; t < m; ++t) {
    for (const auto& qp : far_rule) {
      far_pts[t].push_back(map_to_triangle(qp, tri[t].v0, tri[t].v1, tri[t].v2));
    }
    for (const auto& qp : fine_rule) {
      fine_pts[t].push_back(map_to_triangle(qp, tri[t].v0, tri[t].v1, tri[t].v2));
    }
    // near rule applied per quarter-cell: weights stay normalized to the
    // whole triangle
    emit_uniform(tri[t].v0, tri[t].v1, tri[t].v2, 1, near_rule,
                 [&](const Vector3d& p, double w) {
                   near_wpts[t].push_back({p, w / tri[t].area});
                 });
  }

  const double thr = quad.near_threshold_factor * mesh.mean_edge_length;
  const double inv_k2 = 1.0 / (k0 * k0);

  using Blk = std::array<std::array<cplx, 3>, 3>;
  auto clear = [](Blk& blk) {
    for (auto& row : blk) row.fill(cplx(0.0));
  };

  // One-sided near-pair estimate: test integral over `ta` (outer), source
  // integral over `tb` (analytic static part plus smooth remainder).
  auto near_sweep = [&](const TriData& ta, const TriData& tb, int ia, int ib,
                        Contact contact, const std::array<Vector3d, 2>& shared,
                        Blk& tblk, Blk& kbblk, Blk& knxblk) {
    const bool self = contact == Contact::self;
    const bool pair_k = want_k && !self;  // self PV vanishes pointwise
    const bool touching = contact != Contact::separated;
    const double inv_area = 1.0 / (ta.area * tb.area);

    // constant-term extraction is exact: the integrand is bilinear
    if (req.want_T && quad.extraction_order == 2) {
      cplx c0 = -jj * k0 / (4.0 * pi);
      for (int mi = 0; mi < 3; ++mi) {
        Vector3d cm = ta.centroid - ta.fn[mi].free_v;
        for (int ni = 0; ni < 3; ++ni) {
          Vector3d cn = tb.centroid - tb.fn[ni].free_v;
          tblk[mi][ni] +=
              ta.fn[mi].sl * tb.fn[ni].sl * (0.25 * cm.dot(cn) - inv_k2) * c0;
        }
      }
    }

    // analytic part: graded outer cells against closed-form inner integrals
    // of the static kernel over the source triangle
    Grading gst = static_grading(contact, ta, tb, shared);
    outer_cells(ta.v0, ta.v1, ta.v2, 0, gst, cell_rule, fine_rule,
                [&](const Vector3d& r, double w) {
      auto tp = triangle_potentials(tb.v0, tb.v1, tb.v2, tb.normal, r);
      double s1 = tp.one_over_r / (4.0 * pi);
      Vector3d base = (tp.linear_over_r + tp.rho * tp.one_over_r) / (4.0 * pi);
      Vector3d gstat = tp.grad_one_over_r / (4.0 * pi);
      Vector3d dm[3], tm[3];
      for (int mi = 0; mi < 3; ++mi) {
        dm[mi] = r - ta.fn[mi].free_v;
        if (req.want_K_nxbeta) tm[mi] = dm[mi].cross(ta.normal);
      }
      for (int ni = 0; ni < 3; ++ni) {
        Vector3d j1 = base - tb.fn[ni].free_v * s1;
        Vector3d cx;
        if (pair_k) cx = gstat.cross(r - tb.fn[ni].free_v);
        for (int mi = 0; mi < 3; ++mi) {
          double c = w * inv_area * ta.fn[mi].sl * tb.fn[ni].sl;
          if (req.want_T) {
            tblk[mi][ni] += c * (0.25 * dm[mi].dot(j1) - s1 * inv_k2);
          }
          if (pair_k) {
            if (req.want_K_beta) kbblk[mi][ni] += c * 0.25 * dm[mi].dot(cx);
            if (req.want_K_nxbeta) knxblk[mi][ni] -= c * 0.25 * tm[mi].dot(cx);
          }
        }
      }
    });

    // smooth remainder
    auto accumulate = [&](const Vector3d& r, const Vector3d* dm,
                          const Vector3d* tm, const Vector3d& rp, double fac) {
      Vector3d rv = r - rp;
      double R = rv.norm();
      cplx g = 0.0, gs = 0.0;
      if (req.want_T) g = smooth_g(R, k0, quad.extraction_order);
      if (pair_k) gs = smooth_grad_scale(R, k0);
      for (int ni = 0; ni < 3; ++ni) {
        Vector3d dn = rp - tb.fn[ni].free_v;
        Vector3d cx;
        if (pair_k) cx = rv.cross(dn);
        for (int mi = 0; mi < 3; ++mi) {
          double c = fac * ta.fn[mi].sl * tb.fn[ni].sl;
          if (req.want_T) {
            tblk[mi][ni] += (c * (0.25 * dm[mi].dot(dn) - inv_k2)) * g;
          }
          if (pair_k) {
            cplx kv = (c * 0.25) * gs;
            if (req.want_K_beta) kbblk[mi][ni] += dm[mi].dot(cx) * kv;
            if (req.want_K_nxbeta) knxblk[mi][ni] -= tm[mi].dot(cx) * kv;
          }
        }
      }
    };

    if (touching) {
      // the remainder integrand has a kink along r = r', so full-triangle
      // tensor rules stall; graded outer points against a fixed inner rule
      // converge cleanly instead
      Grading gsm = smooth_grading(contact, ta, shared);
      const double inv_aa = 1.0 / ta.area;
      outer_cells(ta.v0, ta.v1, ta.v2, 0, gsm, cell_rule, fine_rule,
                  [&](const Vector3d& r, double w) {
        Vector3d dm[3], tm[3];
        for (int mi = 0; mi < 3; ++mi) {
          dm[mi] = r - ta.fn[mi].free_v;
          if (req.want_K_nxbeta) tm[mi] = dm[mi].cross(ta.normal);
        }
        if (self) {
          // split the source triangle at the observation point: the kink
          // then sits at subtriangle corners, off the rule points
          const Vector3d* bv[4] = {&tb.v0, &tb.v1, &tb.v2, &tb.v0};
          for (int s = 0; s < 3; ++s) {
            double sub_area = 0.5 * (*bv[s] - r).cross(*bv[s + 1] - r).norm();
            for (const auto& qp : fine_rule) {
              accumulate(r, dm, tm, map_to_triangle(qp, r, *bv[s], *bv[s + 1]),
                         w * qp.w * sub_area * inv_area);
            }
          }
        } else {
          for (size_t j = 0; j < fine_pts[ib].size(); ++j) {
            accumulate(r, dm, tm, fine_pts[ib][j],
                       w * fine_rule[j].w * inv_aa);
          }
        }
      });
    } else {
      const auto& pa = near_wpts[ia];
      const auto& pb = near_wpts[ib];
      for (const auto& qa : pa) {
        Vector3d dm[3], tm[3];
        for (int mi = 0; mi < 3; ++mi) {
          dm[mi] = qa.p - ta.fn[mi].free_v;
          if (req.want_K_nxbeta) tm[mi] = dm[mi].cross(ta.normal);
        }
        for (const auto& qb : pb) {
          accumulate(qa.p, dm, tm, qb.p, qa.w * qb.w);
        }
      }
    }
  };

  Blk t_ab, kb_ab, knx_ab, t_ba, kb_ba, knx_ba;
  for (int a = 0; a < m; ++a) {
    const TriData& ta = tri[a];
    for (int b = 0; b < m; ++b) {
      const TriData& tb = tri[b];
      const bool self = a == b;
      // the self pair is singular and must take the extraction path even at
      // threshold zero
      const bool near = self || (ta.centroid - tb.centroid).norm() < thr;

      if (near) {
        if (b < a) continue;  // near pairs are handled unordered, below
        std::array<Vector3d, 2> shared;
        Contact contact = classify_contact(mesh, a, b, shared);
        clear(t_ab);
        clear(kb_ab);
        clear(knx_ab);
        near_sweep(ta, tb, a, b, contact, shared, t_ab, kb_ab, knx_ab);

        if (self) {
          // symmetrize within the block; K contributions are zero here
          for (int mi = 0; mi < 3; ++mi) {
            for (int ni = 0; ni < 3; ++ni) {
              if (req.want_T) {
                out.T(ta.global[mi], ta.global[ni]) +=
                    0.5 * (t_ab[mi][ni] + t_ab[ni][mi]);
              }
            }
          }
          continue;
        }

        clear(t_ba);
        clear(kb_ba);
        clear(knx_ba);
        near_sweep(tb, ta, b, a, contact, shared, t_ba, kb_ba, knx_ba);

        // T and beta-tested K pair integrals are invariant under exchanging
        // the roles of test and source triangle, so averaging the two
        // one-sided estimates is consistent and symmetric by construction
        for (int mi = 0; mi < 3; ++mi) {
          for (int ni = 0; ni < 3; ++ni) {
            int gm = ta.global[mi], gn = tb.global[ni];
            if (req.want_T) {
              cplx tv = 0.5 * (t_ab[mi][ni] + t_ba[ni][mi]);
              out.T(gm, gn) += tv;
              out.T(gn, gm) += tv;
            }
            if (req.want_K_beta) {
              cplx kv = 0.5 * (kb_ab[mi][ni] + kb_ba[ni][mi]);
              out.K_beta(gm, gn) += kv;
              out.K_beta(gn, gm) += kv;
            }
            if (req.want_K_nxbeta) {
              out.K_nxbeta(gm, gn) += knx_ab[mi][ni];
              out.K_nxbeta(gn, gm) += knx_ba[ni][mi];
            }
          }
        }
        continue;
      }

      // far pair: plain tensor rule on the full kernel
      clear(t_ab);
      clear(kb_ab);
      clear(knx_ab);
      const auto& pa = far_pts[a];
      const auto& pb = far_pts[b];
      for (size_t i = 0; i < pa.size(); ++i) {
        Vector3d dm[3], tm[3];
        for (int mi = 0; mi < 3; ++mi) {
          dm[mi] = pa[i] - ta.fn[mi].free_v;
          if (req.want_K_nxbeta) tm[mi] = dm[mi].cross(ta.normal);
        }
        for (size_t j = 0; j < pb.size(); ++j) {
          Vector3d rv = pa[i] - pb[j];
          double R = rv.norm();
          double w = far_rule[i].w * far_rule[j].w;
          cplx g = 0.0, gs = 0.0;
          if (req.want_T) g = expj(k0 * R) / (4.0 * pi * R);
          if (want_k) gs = full_grad_scale(R, k0);
          Vector3d dn[3], cx[3];
          for (int ni = 0; ni < 3; ++ni) {
            dn[ni] = pb[j] - tb.fn[ni].free_v;
            if (want_k) cx[ni] = rv.cross(dn[ni]);
          }
          for (int mi = 0; mi < 3; ++mi) {
            for (int ni = 0; ni < 3; ++ni) {
              double c = ta.fn[mi].sl * tb.fn[ni].sl;
              if (req.want_T) {
                t_ab[mi][ni] += (w * c * (0.25 * dm[mi].dot(dn[ni]) - inv_k2)) * g;
              }
              cplx kv = (w * c * 0.25) * gs;
              if (req.want_K_beta) kb_ab[mi][ni] += dm[mi].dot(cx[ni]) * kv;
              if (req.want_K_nxbeta) knx_ab[mi][ni] -= tm[mi].dot(cx[ni]) * kv;
            }
          }
        }
      }
      for (int mi = 0; mi < 3; ++mi) {
        for (int ni = 0; ni < 3; ++ni) {
          if (req.want_T) out.T(ta.global[mi], tb.global[ni]) += t_ab[mi][ni];
          if (req.want_K_beta) {
            out.K_beta(ta.global[mi], tb.global[ni]) += kb_ab[mi][ni];
          }
          if (req.want_K_nxbeta) {
            out.K_nxbeta(ta.global[mi], tb.global[ni]) += knx_ab[mi][ni];
          }
        }
      }
    }
  }
  return out;
}

Eigen::MatrixXcd assemble_T(const RwgBasis& basis, double k0,
                            const QuadratureConfig& quad) {
  AssemblyRequest req;
  req.want_T = true;
  return std::move(assemble_operators(basis, k0, quad, req).T);
}

Eigen::MatrixXcd assemble_K(const RwgBasis& basis, double k0,
                            const QuadratureConfig& quad, KTesting testing) {
  AssemblyRequest req;
  req.want_K_beta = testing == KTesting::beta;
  req.want_K_nxbeta = testing == KTesting::n_cross_beta;
  auto set = assemble_operators(basis, k0, quad, req);
  return std::move(testing == KTesting::beta ? set.K_beta : set.K_nxbeta);
}

void save_matrix(const std::string& path, const Eigen::MatrixXcd& mat) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_matrix: cannot open " + path);
  f.write("CSMM", 4);
  std::uint32_t version = 1;
  std::uint64_t rows = mat.rows(), cols = mat.cols();
  f.write(reinterpret_cast<const char*>(&version), sizeof version);
  f.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  f.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  std::vector<double> row(2 * mat.cols());
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      row[2 * j] = mat(i, j).real();
      row[2 * j + 1] = mat(i, j).imag();
    }
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!f) throw std::runtime_error("save_matrix: write failed for " + path);
}

Eigen::MatrixXcd load_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_matrix: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t rows = 0, cols = 0;
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(&version), sizeof version);
  f.read(reinterpret_cast<char*>(&rows), sizeof rows);
  f.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!f || std::string_view(magic, 4) != "CSMM" || version != 1) {
    throw std::runtime_error("load_matrix: bad header in " + path);
  }
  if (rows > (1u << 20) || cols > (1u << 20)) {
    throw std::runtime_error("load_matrix: implausible dimensions in " + path);
  }
  Eigen::MatrixXcd mat(rows, cols);
  std::vector<double> row(2 * cols);
  for (std::uint64_t i = 0; i < rows; ++i) {
    f.read(reinterpret_cast<char*>(row.data()),
           static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!f) throw std::runtime_error("load_matrix: truncated file " + path);
    for (std::uint64_t j = 0; j < cols; ++j) {
      mat(i, j) = cplx(row[2 * j], row[2 * j + 1]);
    }
  }
  return mat;
}

std::uint64_t operator_cache_key(const Mesh& mesh, double k0,
                                 const QuadratureConfig& quad,
                                 std::string_view kind) {
  std::uint64_t h = 14695981039346656037ull;
  auto feed = [&h](const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& v : mesh.vertices) {
    double c[3] = {v.x(), v.y(), v.z()};
    feed(c, sizeof c);
  }
  for (const auto& t : mesh.triangles) feed(t.data(), sizeof(int) * 3);
  feed(&k0, sizeof k0);
  feed(&quad.far_points, sizeof quad.far_points);
  feed(&quad.near_points, sizeof quad.near_points);
  feed(&quad.near_threshold_factor, sizeof quad.near_threshold_factor);
  feed(&quad.extraction_order, sizeof quad.extraction_order);
  feed(kind.data(), kind.size());
  return h;
}

}  // namespace csmom
