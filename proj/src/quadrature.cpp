#include "qmnls/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "qmnls/errors.hpp"

namespace qmnls {

namespace {

// QUADPACK qk21 abscissae and weights. Odd entries of xgk are the 10-point
// Gauss nodes.
constexpr double wg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double xgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

constexpr double wgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

struct Piece {
  double a, b;
  QuadResult r;
  bool operator<(const Piece& o) const { return r.error < o.r.error; }
};

double target(const QuadOptions& opts, double value) {
  return std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
}

}  // namespace

QuadResult& QuadResult::operator+=(const QuadResult& other) {
  value += other.value;
  error += other.error;
  evaluations += other.evaluations;
  converged = converged && other.converged;
  return *this;
}

QuadResult gauss_kronrod21(const Integrand& f, double a, double b) {
  constexpr double epmach = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  double fv1[10], fv2[10];
  const double fc = f(centr);
  double resg = 0.0;
  double resk = wgk[10] * fc;
  double resabs = std::abs(resk);
  for (int j = 0; j < 10; ++j) {
    const double absc = hlgth * xgk[j];
    fv1[j] = f(centr - absc);
    fv2[j] = f(centr + absc);
    const double fsum = fv1[j] + fv2[j];
    resk += wgk[j] * fsum;
    resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) resg += wg[j / 2] * fsum;
  }
  const double reskh = 0.5 * resk;
  double resasc = wgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  QuadResult out;
  out.value = resk * hlgth;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double err = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > uflow / (50.0 * epmach)) err = std::max(50.0 * epmach * resabs, err);
  out.error = err;
  out.evaluations = 21;
  out.converged = std::isfinite(out.value);
  return out;
}

QuadResult integrate(const Integrand& f, std::span<const double> points, QuadOptions opts) {
  if (points.size() < 2) throw UsageError("integrate needs at least two points");
  std::priority_queue<Piece> heap;
  QuadResult total;
  total.converged = true;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i] < points[i + 1])) continue;
    const QuadResult r = gauss_kronrod21(f, points[i], points[i + 1]);
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations;
    heap.push({points[i], points[i + 1], r});
  }
  if (heap.empty()) return total;

  while (total.error > target(opts, total.value)) {
    if (!std::isfinite(total.value) || heap.size() >= opts.max_intervals) {
      total.converged = false;
      break;
    }
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      total.converged = false;
      break;
    }
    heap.pop();
    const QuadResult left = gauss_kronrod21(f, worst.a, mid);
    const QuadResult right = gauss_kronrod21(f, mid, worst.b);
    total.value += left.value + right.value - worst.r.value;
    total.error += left.error + right.error - worst.r.error;
    total.evaluations += 42;
    heap.push({worst.a, mid, left});
    heap.push({mid, worst.b, right});
  }

  // Re-sum to shed the drift of the running updates.
  double value = 0.0, error = 0.0;
  while (!heap.empty()) {
    value += heap.top().r.value;
    error += heap.top().r.error;
    heap.pop();
  }
  total.value = value;
  total.error = error;
  if (!std::isfinite(value)) total.converged = false;
  return total;
}

QuadResult integrate(const Integrand& f, double a, double b, QuadOptions opts) {
  const double pts[2] = {a, b};
  return integrate(f, pts, opts);
}

QuadResult integrate_tail(const Integrand& f, double a, int direction, double scale, QuadOptions opts) {
  if (!(scale > 0.0)) throw UsageError("integrate_tail needs a positive scale");
  const double dir = direction < 0 ? -1.0 : 1.0;
  const Integrand mapped = [&](double u) {
    const double g = std::exp(u);
    return f(a + dir * scale * (g - 1.0)) * scale * g;
  };
  const double u_max = std::log(1e300 / (scale + std::abs(a)));

  QuadResult total;
  total.converged = false;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (double u = 0.0; u + 1.0 <= u_max; u += 1.0) {
    QuadOptions chunk = opts;
    chunk.abs_tol = 0.1 * target(opts, total.value);
    const QuadResult c = integrate(mapped, u, u + 1.0, chunk);
    total.value += c.value;
    total.error += c.error;
    total.evaluations += c.evaluations;
    if (!c.converged) return total;
    const double mag = std::abs(c.value);
    if (u > 0.0) {
      if (mag == 0.0 && prev == 0.0) {
        total.converged = true;
        break;
      }
      if (prev > 0.0) {
        const double q = mag / prev;
        if (q < 1.0) {
          const double tail = mag * q / (1.0 - q);
          if (tail <= target(opts, total.value)) {
            total.error += tail;
            total.converged = true;
            break;
          }
        }
      }
    }
    prev = mag;
  }
  return total;
}

QuadResult integrate_line(const Integrand& f, std::vector<double> points, double tail_scale,
                          QuadOptions opts) {
  if (points.empty()) points.push_back(0.0);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  QuadResult total = integrate_tail(f, points.front(), -1, tail_scale, opts);
  if (points.size() > 1) total += integrate(f, points, opts);
  total += integrate_tail(f, points.back(), +1, tail_scale, opts);
  return total;
}

Extrapolation wynn_epsilon(std::span<const double> s) {
  const std::size_t n = s.size();
  if (n == 0) throw UsageError("wynn_epsilon needs a non-empty sequence");
  Extrapolation best{s.back(), n > 1 ? std::abs(s[n - 1] - s[n - 2]) : std::abs(s.back())};
  if (n < 3) return best;

  std::vector<double> prev(n + 1, 0.0);
  std::vector<double> cur(s.begin(), s.end());
  double last_even = s.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(n - k);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double diff = cur[i + 1] - cur[i];
      if (diff == 0.0 || !std::isfinite(diff)) return best;
      next[i] = prev[i + 1] + 1.0 / diff;
    }
    if (k % 2 == 0) {
      const double est = next.back();
      const double change = std::abs(est - last_even);
      if (std::isfinite(est) && (k == 2 || change < best.error)) best = {est, change};
      last_even = est;
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return best;
}

}  // namespace qmnls
