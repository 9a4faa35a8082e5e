#include "cbfed/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cbfed {
namespace {

class RuleBuilder {
 public:
  explicit RuleBuilder(int degree) { rule_.degree = degree; }

  // Weights in the tables are normalized to sum 1; scaled to the reference area here.
  RuleBuilder& centroid(double w) {
    add(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w);
    return *this;
  }

  RuleBuilder& orbit3(double a, double w) {
    const double c = 1.0 - 2.0 * a;
    add(a, a, c, w);
    add(a, c, a, w);
    add(c, a, a, w);
    return *this;
  }

  RuleBuilder& orbit6(double a, double b, double w) {
    const double c = 1.0 - a - b;
    add(a, b, c, w);
    add(a, c, b, w);
    add(b, a, c, w);
    add(b, c, a, w);
    add(c, a, b, w);
    add(c, b, a, w);
    return *this;
  }

  QuadratureRule build() { return std::move(rule_); }

 private:
  void add(double l1, double l2, double l3, double w) {
    rule_.points.push_back({l1, l2, l3});
    rule_.weights.push_back(0.5 * w);
  }

  QuadratureRule rule_;
};

QuadratureRule dunavant(int degree) {
  switch (degree) {
    case 1:
      return RuleBuilder(1).centroid(1.0).build();
    case 2:
      return RuleBuilder(2).orbit3(1.0 / 6.0, 1.0 / 3.0).build();
    case 4:
      return RuleBuilder(4)
          .orbit3(0.44594849091596488631832925388305, 0.22338158967801146569500700843312)
          .orbit3(0.09157621350977074345957146340220, 0.10995174365532186763832632490021)
          .build();
    case 5:
      return RuleBuilder(5)
          .centroid(0.225)
          .orbit3(0.47014206410511508977044120951345, 0.13239415278850618073764938783315)
          .orbit3(0.10128650732345633880098736191512, 0.12593918054482715259568394550018)
          .build();
    case 6:
      return RuleBuilder(6)
          .orbit3(0.24928674517091042129163855310702, 0.11678627572637936602528961138558)
          .orbit3(0.06308901449150222834033160287082, 0.05084490637020681692093680910686)
          .orbit6(0.31035245103378440541660773395655, 0.63650249912139864723014259441205,
                  0.08285107561837357519355345642044)
          .build();
    case 8:
      return RuleBuilder(8)
          .centroid(0.14431560767778716825109111048906)
          .orbit3(0.17056930775176020662229350149146, 0.10321737053471825028179155029212)
          .orbit3(0.05054722831703097545842355059660, 0.03245849762319808031092592834178)
          .orbit3(0.45929258829272315602881551449417, 0.09509163426728462479389610438858)
          .orbit6(0.26311282963463811342178578628464, 0.72849239295540428124100037917606,
                  0.02723031417443499426484469007390)
          .build();
    case 9:
      return RuleBuilder(9)
          .centroid(0.09713579628279609890744676309485)
          .orbit3(0.48968251919873762778370692483619, 0.03133470022713983234393199080984)
          .orbit3(0.43708959149293663726993036443535, 0.07782754100477543338465495857972)
          .orbit3(0.18820353561903273024096128046733, 0.07964773892720910288013526957424)
          .orbit3(0.04472951339445297061024247196780, 0.02557767565869810438673914467637)
          .orbit6(0.22196298916076569567510252769319, 0.74119859878449802069007987352342,
                  0.04328353937728937728937728937729)
          .build();
    case 10:
      return RuleBuilder(10)
          .centroid(0.090817990382754)
          .orbit3(0.485577633383657, 0.036725957756467)
          .orbit3(0.109481575485037, 0.045321059435528)
          .orbit6(0.141707219414880, 0.307939838764121, 0.072757916845420)
          .orbit6(0.025003534762686, 0.246672560639903, 0.028327242531057)
          .orbit6(0.009540815400299, 0.066803251012200, 0.009421666963733)
          .build();
    default:
      throw std::logic_error("no Dunavant table for degree " + std::to_string(degree));
  }
}

}  // namespace

QuadratureRule triangle_quadrature(int min_degree) {
  if (min_degree < 1 || min_degree > kMaxTriangleDegree) {
    throw std::invalid_argument("triangle_quadrature: unsupported degree " +
                                std::to_string(min_degree));
  }
  // Degrees 3 and 7 of the Dunavant family have a negative weight.
  if (min_degree == 3) return dunavant(4);
  if (min_degree == 7) return dunavant(8);
  return dunavant(min_degree);
}

QuadratureRule edge_quadrature(int min_degree) {
  if (min_degree < 0 || min_degree > 99) {
    throw std::invalid_argument("edge_quadrature: unsupported degree " +
                                std::to_string(min_degree));
  }
  const int npts = std::max(1, (min_degree + 2) / 2);
  QuadratureRule rule;
  rule.degree = 2 * npts - 1;
  rule.points.resize(npts);
  rule.weights.resize(npts);
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  for (int i = 0; i < npts; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= npts; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = npts == 1 ? x : p1;
      const double pnm1 = npts == 1 ? 1.0 : p0;
      dp = npts * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Map [-1,1] to [0,1]; nodes come out in descending order, store ascending.
    const int slot = npts - 1 - i;
    rule.points[slot] = {0.5 * (1.0 + x), 0.0, 0.0};
    rule.weights[slot] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace cbfed
