#include "spok/quad.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "spok/errors.hpp"

namespace spok {
namespace {

// 15-point Kronrod nodes on [-1,1] (positive half) and weights, with the
// embedded 7-point Gauss weights on the odd-indexed nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  double integral;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// One K15/G7 evaluation on [a,b]; returns (kronrod, |kronrod - gauss|).
template <typename Eval>
Segment gk15(Eval&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    if (i == 7) {
      const double v = f(c);
      resk += kWgk[7] * v;
      resg += kWg[3] * v;
      break;
    }
    const double v1 = f(c - h * kXgk[i]);
    const double v2 = f(c + h * kXgk[i]);
    resk += kWgk[i] * (v1 + v2);
    if (i % 2 == 1) resg += kWg[i / 2] * (v1 + v2);
  }
  resk *= h;
  resg *= h;
  return {a, b, resk, std::abs(resk - resg)};
}

}  // namespace

double gk_integrate(const std::function<double(double)>& f, double a, double b,
                    double abs_tol, double rel_tol, std::size_t max_intervals) {
  if (!(b > a)) return 0.0;
  std::priority_queue<Segment> segs;
  segs.push(gk15(f, a, b));
  double total = segs.top().integral;
  double err = segs.top().error;
  while (segs.size() < max_intervals) {
    const double tol = std::max(abs_tol, rel_tol * std::abs(total));
    if (err <= tol) return total;
    Segment worst = segs.top();
    segs.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    total += left.integral + right.integral - worst.integral;
    err += left.error + right.error - worst.error;
    segs.push(left);
    segs.push(right);
  }
  const double tol = std::max(abs_tol, rel_tol * std::abs(total));
  if (err <= tol) return total;
  throw ConvergenceError("gk_integrate: interval budget exhausted");
}

std::vector<double> gk_integrate_vec(
    const std::function<void(double, double*)>& f, std::size_t dim, double a,
    double b, double abs_tol, std::size_t max_intervals) {
  if (dim == 0) return {};
  if (!(b > a)) return std::vector<double>(dim, 0.0);

  struct VSeg {
    double a, b, error;
    std::vector<double> integral;
    bool operator<(const VSeg& o) const { return error < o.error; }
  };

  std::vector<double> buf(dim);
  auto eval = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    std::vector<double> resk(dim, 0.0), resg(dim, 0.0);
    for (int i = 0; i < 8; ++i) {
      if (i == 7) {
        f(c, buf.data());
        for (std::size_t d = 0; d < dim; ++d) {
          resk[d] += kWgk[7] * buf[d];
          resg[d] += kWg[3] * buf[d];
        }
        break;
      }
      f(c - h * kXgk[i], buf.data());
      std::vector<double> tmp(buf);
      f(c + h * kXgk[i], buf.data());
      for (std::size_t d = 0; d < dim; ++d) {
        const double s = tmp[d] + buf[d];
        resk[d] += kWgk[i] * s;
        if (i % 2 == 1) resg[d] += kWg[i / 2] * s;
      }
    }
    double err = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      resk[d] *= h;
      resg[d] *= h;
      err = std::max(err, std::abs(resk[d] - resg[d]));
    }
    return VSeg{lo, hi, err, std::move(resk)};
  };

  std::priority_queue<VSeg> segs;
  segs.push(eval(a, b));
  std::vector<double> total = segs.top().integral;
  double err = segs.top().error;
  std::size_t n_segs = 1;
  while (n_segs < max_intervals) {
    if (err <= abs_tol) return total;
    VSeg worst = segs.top();
    segs.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    VSeg left = eval(worst.a, mid);
    VSeg right = eval(mid, worst.b);
    for (std::size_t d = 0; d < dim; ++d)
      total[d] += left.integral[d] + right.integral[d] - worst.integral[d];
    err += left.error + right.error - worst.error;
    segs.push(std::move(left));
    segs.push(std::move(right));
    ++n_segs;
  }
  if (err <= abs_tol) return total;
  throw ConvergenceError("gk_integrate_vec: interval budget exhausted");
}

}  // namespace spok
