#include "csmom/quadrature.hpp"

#include <stdexcept>

namespace csmom {

namespace {

std::vector<TriQuadPoint> make_rule(int points) {
  std::vector<TriQuadPoint> r;
  auto push3 = [&r](double a, double b, double w) {
    // permutations of (a, b, b)
    r.push_back({a, b, b, w});
    r.push_back({b, a, b, w});
    r.push_back({b, b, a, w});
  };
  auto push6 = [&r](double a, double b, double c, double w) {
    r.push_back({a, b, c, w});
    r.push_back({a, c, b, w});
    r.push_back({b, a, c, w});
    r.push_back({b, c, a, w});
    r.push_back({c, a, b, w});
    r.push_back({c, b, a, w});
  };
  switch (points) {
    case 1:
      r.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0});
      break;
    case 3:
      push3(2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0);
      break;
    case 6:
      push3(0.108103018168070, 0.445948490915965, 0.223381589678011);
      push3(0.816847572980459, 0.091576213509771, 0.109951743655322);
      break;
    case 7:
      r.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225});
      push3(0.059715871789770, 0.470142064105115, 0.132394152788506);
      push3(0.797426985353087, 0.101286507323456, 0.125939180544827);
      break;
    case 12:
      push3(0.501426509658179, 0.249286745170910, 0.116786275726379);
      push3(0.873821971016996, 0.063089014491502, 0.050844906370207);
      push6(0.053145049844817, 0.310352451033784, 0.636502499121399,
            0.082851075618374);
      break;
    default:
      throw std::invalid_argument("triangle_rule: unsupported point count " +
                                  std::to_string(points));
  }
  return r;
}

}  // namespace

const std::vector<TriQuadPoint>& triangle_rule(int points) {
  static const std::vector<TriQuadPoint> r1 = make_rule(1);
  static const std::vector<TriQuadPoint> r3 = make_rule(3);
  static const std::vector<TriQuadPoint> r6 = make_rule(6);
  static const std::vector<TriQuadPoint> r7 = make_rule(7);
  static const std::vector<TriQuadPoint> r12 = make_rule(12);
  switch (points) {
    case 1: return r1;
    case 3: return r3;
    case 6: return r6;
    case 7: return r7;
    case 12: return r12;
    default:
      throw std::invalid_argument("triangle_rule: unsupported point count " +
                                  std::to_string(points));
  }
}

}  // namespace csmom
