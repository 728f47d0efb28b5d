#include "stickperm/factor_model.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "stickperm/errors.hpp"
#include "stickperm/numerics.hpp"

namespace stickperm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Integrands such as e^{-k v(u)} carry ~1e-13 relative roundoff for k ~ 10^3.
constexpr double kQuadTol = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_number(std::string_view text, std::string_view spec) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError("model spec '" + std::string(spec) + "': bad number '" + std::string(text) + "'");
  }
  return value;
}

double log_gamma_ratio(double x, double y) {
  // log(Gamma(x)/Gamma(y)); boost keeps relative accuracy for large arguments.
  if (x == y) return 0.0;
  return std::log(boost::math::tgamma_ratio(x, y));
}

// V as a function of the uniform u it is generated from.
double pareto_v(double u, double alpha) { return std::pow(u, -1.0 / alpha); }

// Antiderivatives of -log w, w (-log w), log^2 w and w log^2 w; all vanish at 0.
struct LogPrimitives {
  double l1, wl1, l2, wl2;
};

LogPrimitives log_primitives(double w) {
  if (w <= 0.0) return {0.0, 0.0, 0.0, 0.0};
  const double l = std::log(w);
  return {w - w * l, 0.25 * w * w - 0.5 * w * w * l, w * (l * l - 2.0 * l + 2.0),
          0.5 * w * w * (l * l - l + 0.5)};
}

// Exact log moments of a piecewise-linear density: on each panel
// f(w) = c0 + c1 w, and the integrals are elementary.
MomentSummary table_log_moments(const DensityTable& t) {
  const auto& x = t.x();
  const auto& f = t.f();
  CompensatedSum mu, m2, nu;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i], b = x[i + 1];
    if (!(b > a)) continue;
    const double c1 = (f[i + 1] - f[i]) / (b - a);
    const double c0 = f[i] - c1 * a;
    const auto pa = log_primitives(a), pb = log_primitives(b);
    mu += c0 * (pb.l1 - pa.l1) + c1 * (pb.wl1 - pa.wl1);
    m2 += c0 * (pb.l2 - pa.l2) + c1 * (pb.wl2 - pa.wl2);
    // -log(1-w) with v = 1 - w: density (c0 + c1) - c1 v on [1-b, 1-a].
    const auto qa = log_primitives(1.0 - b), qb = log_primitives(1.0 - a);
    nu += (c0 + c1) * (qb.l1 - qa.l1) - c1 * (qb.wl1 - qa.wl1);
  }
  const double m = mu.value();
  return MomentSummary{m, std::max(0.0, m2.value() - m * m), nu.value()};
}

// Difference of regularized incomplete betas I_hi - I_lo, taken from whichever
// side keeps the most digits.
double ibeta_difference(double a, double b, double lo, double hi) {
  const double i_lo = boost::math::ibeta(a, b, lo);
  if (i_lo < 0.5) return boost::math::ibeta(a, b, hi) - i_lo;
  return boost::math::ibetac(a, b, lo) - boost::math::ibetac(a, b, hi);
}

}  // namespace

// ---------------------------------------------------------------- DensityTable

DensityTable DensityTable::from_points(std::vector<double> x, std::vector<double> f) {
  if (x.size() != f.size() || x.size() < 2) {
    throw ValidationError("density table needs at least two (x,f) points");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && x[i] < 1.0)) throw ValidationError("density table x must lie in (0,1)");
    if (!(f[i] >= 0.0) || !std::isfinite(f[i])) throw ValidationError("density table f must be finite and >= 0");
    if (i > 0 && !(x[i] > x[i - 1])) throw ValidationError("density table x must be strictly increasing");
  }
  CompensatedSum mass;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) mass += 0.5 * (f[i] + f[i + 1]) * (x[i + 1] - x[i]);
  const double total = mass.value();
  if (std::abs(total - 1.0) > 1e-6) {
    throw ValidationError("density table integrates to " + shortest(total) + ", expected 1 within 1e-6");
  }
  for (double& v : f) v /= total;

  DensityTable t;
  t.x_ = std::move(x);
  t.f_ = std::move(f);
  t.cumulative_.assign(t.x_.size(), 0.0);
  CompensatedSum acc;
  for (std::size_t i = 0; i + 1 < t.x_.size(); ++i) {
    acc += 0.5 * (t.f_[i] + t.f_[i + 1]) * (t.x_[i + 1] - t.x_[i]);
    t.cumulative_[i + 1] = acc.value();
  }
  return t;
}

DensityTable DensityTable::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open density table '" + path.string() + "'");
  std::vector<double> x;
  std::vector<double> f;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("density table line without comma: '" + line + "'");
    const std::string_view lhs(line.data(), comma);
    const std::string_view rhs(line.data() + comma + 1, line.size() - comma - 1);
    double xv = 0.0;
    auto [p, ec] = std::from_chars(lhs.data(), lhs.data() + lhs.size(), xv);
    if (ec != std::errc{} && first) {
      first = false;  // header
      continue;
    }
    first = false;
    x.push_back(parse_number(lhs, path.string()));
    f.push_back(parse_number(rhs, path.string()));
  }
  auto table = from_points(std::move(x), std::move(f));
  table.source_ = path.string();
  return table;
}

double DensityTable::density(double w) const noexcept {
  if (w < x_.front() || w > x_.back()) return 0.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), w);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - x_.begin()) - 1, x_.size() - 2);
  const double s = (f_[i + 1] - f_[i]) / (x_[i + 1] - x_[i]);
  return f_[i] + s * (w - x_[i]);
}

double DensityTable::cdf(double w) const noexcept {
  if (w <= x_.front()) return 0.0;
  if (w >= x_.back()) return 1.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), w);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double s = (f_[i + 1] - f_[i]) / (x_[i + 1] - x_[i]);
  const double d = w - x_[i];
  return cumulative_[i] + f_[i] * d + 0.5 * s * d * d;
}

double DensityTable::survival(double w) const noexcept {
  if (w <= x_.front()) return 1.0;
  if (w >= x_.back()) return 0.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), w);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double s = (f_[i + 1] - f_[i]) / (x_[i + 1] - x_[i]);
  // Mass on [w, x_{i+1}] plus everything to the right of x_{i+1}.
  const double d = x_[i + 1] - w;
  const double right = cumulative_.back() - cumulative_[i + 1];
  return right + f_[i + 1] * d - 0.5 * s * d * d;
}

double DensityTable::quantile(double u) const noexcept {
  const double target = u * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
  const double s = (f_[i + 1] - f_[i]) / (x_[i + 1] - x_[i]);
  const double r = target - cumulative_[i];
  const double disc = std::max(0.0, f_[i] * f_[i] + 2.0 * s * r);
  const double denom = f_[i] + std::sqrt(disc);
  const double d = denom > 0.0 ? 2.0 * r / denom : 0.0;
  return std::clamp(x_[i] + d, x_[i], x_[i + 1]);
}

double DensityTable::binomial_moment(std::uint64_t n, std::uint64_t m) const {
  // On each segment f(w) = c0 + c1 w, and
  //   C(n,m) int w^k (1-w)^m dw        = I(k+1, m+1) / (n+1)
  //   C(n,m) int w^(k+1) (1-w)^m dw    = (k+1) I(k+2, m+1) / ((n+1)(n+2))
  // with I the regularized incomplete beta increment over the segment.
  const double k = static_cast<double>(n - m);
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    const double s = (f_[i + 1] - f_[i]) / (x_[i + 1] - x_[i]);
    const double c0 = f_[i] - s * x_[i];
    const double c1 = s;
    total += c0 / (nd + 1.0) * ibeta_difference(k + 1.0, md + 1.0, x_[i], x_[i + 1]);
    if (c1 != 0.0) {
      total += c1 * (k + 1.0) / ((nd + 1.0) * (nd + 2.0)) *
               ibeta_difference(k + 2.0, md + 1.0, x_[i], x_[i + 1]);
    }
  }
  return total.value();
}

double DensityTable::one_minus_power_moment(std::uint64_t n) const {
  const double nd = static_cast<double>(n);
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    const double a = x_[i];
    const double b = x_[i + 1];
    const double s = (f_[i + 1] - f_[i]) / (b - a);
    const double c0 = f_[i] - s * a;
    const double c1 = s;
    const double pa1 = std::pow(a, nd + 1.0);
    const double pb1 = std::pow(b, nd + 1.0);
    total += c0 * ((b - a) - (pb1 - pa1) / (nd + 1.0));
    total += c1 * (0.5 * (b * b - a * a) - (pb1 * b - pa1 * a) / (nd + 2.0));
  }
  return total.value();
}

// ---------------------------------------------------------------- SlowlyVarying

double SlowlyVarying::operator()(double x) const {
  if (log_power == 0.0) return coef;
  const double lx = std::log(x);
  if (lx <= 0.0) return 0.0;
  return coef * std::pow(lx, log_power);
}

bool MomentSummary::mu_finite() const noexcept { return std::isfinite(mu); }
bool MomentSummary::sigma2_finite() const noexcept { return std::isfinite(sigma2); }
bool MomentSummary::nu_finite() const noexcept { return std::isfinite(nu); }

// ---------------------------------------------------------------- FactorModel

FactorModel::FactorModel(FactorLaw law) : law_(std::move(law)) { moments_ = compute_moments(); }

FactorModel FactorModel::beta(double a, double b) {
  if (!(a > 0.0 && b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ValidationError("beta parameters must be finite and positive");
  }
  return FactorModel(BetaLaw{a, b});
}

FactorModel FactorModel::pareto_log(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("paretolog alpha must be finite and positive");
  return FactorModel(ParetoLogLaw{alpha});
}

FactorModel FactorModel::tabulated(DensityTable table) {
  return FactorModel(TabulatedLaw{std::make_shared<const DensityTable>(std::move(table))});
}

FactorModel FactorModel::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("model spec '" + std::string(spec) + "' must look like beta:a,b | paretolog:alpha | table:<path>");
  }
  const auto kind = spec.substr(0, colon);
  const auto args = spec.substr(colon + 1);
  if (kind == "beta") {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) throw ValidationError("beta spec needs two parameters: beta:a,b");
    return beta(parse_number(args.substr(0, comma), spec), parse_number(args.substr(comma + 1), spec));
  }
  if (kind == "paretolog") return pareto_log(parse_number(args, spec));
  if (kind == "table") {
    if (args.empty()) throw ValidationError("table spec needs a path: table:<path>");
    return tabulated(DensityTable::from_csv(std::filesystem::path(std::string(args))));
  }
  throw ValidationError("unknown model kind '" + std::string(kind) + "'");
}

std::string FactorModel::spec() const {
  return std::visit(Overloaded{
                        [](const BetaLaw& l) { return "beta:" + shortest(l.a) + "," + shortest(l.b); },
                        [](const ParetoLogLaw& l) { return "paretolog:" + shortest(l.alpha); },
                        [](const TabulatedLaw& l) { return "table:" + l.table->source(); },
                    },
                    law_);
}

TailClass FactorModel::tail_class() const {
  if (const auto* p = std::get_if<ParetoLogLaw>(&law_)) {
    return RegularlyVaryingTail{p->alpha, SlowlyVarying{}};
  }
  return LightTail{};
}

std::optional<SlowlyVarying> FactorModel::truncated_second_moment() const {
  if (const auto* p = std::get_if<ParetoLogLaw>(&law_); p && p->alpha == 2.0) {
    // int_1^x y^2 * 2 y^-3 dy = 2 log x
    return SlowlyVarying{2.0, 1.0};
  }
  return std::nullopt;
}

MomentSummary FactorModel::compute_moments() const {
  using boost::math::digamma;
  using boost::math::trigamma;
  return std::visit(
      Overloaded{
          [](const BetaLaw& l) {
            return MomentSummary{digamma(l.a + l.b) - digamma(l.a), trigamma(l.a) - trigamma(l.a + l.b),
                                 digamma(l.a + l.b) - digamma(l.b)};
          },
          [](const ParetoLogLaw& l) {
            const double alpha = l.alpha;
            const double mu = alpha > 1.0 ? alpha / (alpha - 1.0) : kInf;
            const double sigma2 = alpha > 2.0 ? alpha / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0)) : kInf;
            const double nu = integrate(
                [alpha](double u) {
                  if (u <= 0.0) return 0.0;
                  return -std::log1p(-std::exp(-pareto_v(u, alpha)));
                },
                0.0, 1.0, kQuadTol, "paretolog nu");
            return MomentSummary{mu, sigma2, nu};
          },
          [](const TabulatedLaw& l) { return table_log_moments(*l.table); },
      },
      law_);
}

FactorDraw FactorModel::draw(Generator& gen) const {
  for (;;) {
    FactorDraw d = std::visit(
        Overloaded{
            [&gen](const BetaLaw& l) {
              if (l.b == 1.0) {
                const double lw = std::log(uniform_open(gen)) / l.a;
                const double omw = -std::expm1(lw);
                return FactorDraw{std::exp(lw), omw, -lw, -std::log(omw)};
              }
              if (l.a == 1.0) {
                const double lomw = std::log(uniform_open(gen)) / l.b;
                const double w = -std::expm1(lomw);
                return FactorDraw{w, std::exp(lomw), -std::log(w), -lomw};
              }
              const double x = sample_gamma(gen, l.a);
              const double y = sample_gamma(gen, l.b);
              const double ls = std::log(x + y);
              return FactorDraw{x / (x + y), y / (x + y), ls - std::log(x), ls - std::log(y)};
            },
            [&gen](const ParetoLogLaw& l) {
              const double v = pareto_v(uniform_open(gen), l.alpha);
              const double omw = -std::expm1(-v);
              return FactorDraw{std::exp(-v), omw, v, -std::log(omw)};
            },
            [&gen](const TabulatedLaw& l) {
              const double w = l.table->quantile(uniform_open(gen));
              return FactorDraw{w, 1.0 - w, -std::log(w), -std::log1p(-w)};
            },
        },
        law_);
    // 1 - W must stay positive; W itself may underflow when |log W| is huge,
    // xi still carries the exact value.
    if (d.one_minus_w > 0.0 && d.w < 1.0 && std::isfinite(d.xi) && d.xi > 0.0) return d;
  }
}

double FactorModel::sample(Generator& gen) const {
  for (;;) {
    const double w = draw(gen).w;
    if (w > 0.0 && w < 1.0) return w;
  }
}

double FactorModel::eta_tail(double x) const {
  if (x <= 0.0) return 1.0;
  const double e = std::exp(-x);
  return std::visit(Overloaded{
                        [&](const BetaLaw& l) {
                          if (l.a == 1.0) return std::exp(-l.b * x);
                          if (l.b == 1.0) return -std::expm1(l.a * std::log1p(-e));
                          return boost::math::ibeta(l.b, l.a, e);
                        },
                        [&](const ParetoLogLaw& l) {
                          // eta > x  <=>  V < -log(1 - e^-x)
                          const double v = -std::log(-std::expm1(-x));
                          return v <= 1.0 ? 0.0 : -std::expm1(-l.alpha * std::log(v));
                        },
                        [&](const TabulatedLaw& l) { return l.table->survival(-std::expm1(-x)); },
                    },
                    law_);
}

double FactorModel::xi_tail(double x) const {
  if (x <= 0.0) return 1.0;
  return std::visit(Overloaded{
                        [&](const BetaLaw& l) {
                          if (l.b == 1.0) return std::exp(-l.a * x);
                          if (l.a == 1.0) return -std::expm1(l.b * std::log1p(-std::exp(-x)));
                          return boost::math::ibeta(l.a, l.b, std::exp(-x));
                        },
                        [&](const ParetoLogLaw& l) { return x < 1.0 ? 1.0 : std::pow(x, -l.alpha); },
                        [&](const TabulatedLaw& l) { return l.table->cdf(std::exp(-x)); },
                    },
                    law_);
}

namespace {

// The eta tail can have a logarithmic cusp at 0 (ParetoLog: 1 - |log z|^-alpha),
// so the first panel is integrated in s = -log z, where it is smooth.
double integrate_eta_panels(const std::function<double(double)>& g, const std::vector<double>& br,
                            std::string_view what) {
  const double first = br.at(1);
  double total = integrate(
      [&g](double s) {
        const double z = std::exp(-s);
        return z > 0.0 ? g(z) * z : 0.0;
      },
      -std::log(first), std::numeric_limits<double>::infinity(), kQuadTol, what);
  total += integrate_panels(g, std::span<const double>(br).subspan(1), kQuadTol, what);
  return total;
}

}  // namespace

std::vector<double> FactorModel::eta_breakpoints(double y) const {
  std::vector<double> br{0.0};
  std::visit(Overloaded{
                 [&](const BetaLaw&) {
                   for (double p = 1.0; p < y; p *= 2.0) br.push_back(p);
                 },
                 [&](const ParetoLogLaw&) {
                   // eta never exceeds -log(1 - e^-1)
                   const double cap = -std::log1p(-std::exp(-1.0));
                   if (cap < y) br.push_back(cap);
                 },
                 [&](const TabulatedLaw& l) {
                   for (double xi : l.table->x()) {
                     const double z = -std::log1p(-xi);
                     if (z > 0.0 && z < y) br.push_back(z);
                   }
                   for (double p = 1.0; p < y; p *= 2.0) br.push_back(p);
                 },
             },
             law_);
  br.push_back(y);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

double FactorModel::r_star(double y) const {
  if (y <= 0.0) return 0.0;
  if (const auto* l = std::get_if<BetaLaw>(&law_); l && l->a == 1.0) {
    return -std::expm1(-l->b * y) / l->b;
  }
  return integrate_eta_panels([this](double z) { return eta_tail(z); }, eta_breakpoints(y), "r_star");
}

double FactorModel::r_star_integral(double y) const {
  if (y <= 0.0) return 0.0;
  if (const auto* l = std::get_if<BetaLaw>(&law_); l && l->a == 1.0) {
    const double b = l->b;
    return y / b + std::expm1(-b * y) / (b * b);
  }
  return integrate_eta_panels([this, y](double z) { return (y - z) * eta_tail(z); }, eta_breakpoints(y),
                              "r_star integral");
}

namespace {

// log C(n,m) E[W^k (1-W)^m], k = n - m, for W = e^-V with P{V > v} = v^-alpha.
// In v the log-integrand g is unimodal on [1, inf); panels are laid out on
// the scale of its curvature (or of its slope when the peak sits at v = 1),
// and the polynomial tail beyond them is integrated in u = v^-alpha.
double pareto_log_binomial_moment(double alpha, std::uint64_t n, std::uint64_t m) {
  const double kd = static_cast<double>(n - m);
  const double md = static_cast<double>(m);
  const double lc = log_choose(n, m);
  const auto mixed = [&](double v) { return lc - kd * v + (m > 0 ? md * std::log(-std::expm1(-v)) : 0.0); };
  const auto g = [&](double v) { return mixed(v) + std::log(alpha) - (alpha + 1.0) * std::log(v); };
  const auto dg = [&](double v) { return -kd + (m > 0 ? md / std::expm1(v) : 0.0) - (alpha + 1.0) / v; };
  const auto d2g = [&](double v) {
    const double e = std::expm1(v);
    return (m > 0 ? -md * (e + 1.0) / (e * e) : 0.0) + (alpha + 1.0) / (v * v);
  };

  double peak = 1.0;
  if (dg(1.0) > 0.0) {
    double lo = 1.0, hi = 2.0;
    while (dg(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (dg(mid) > 0.0 ? lo : hi) = mid;
    }
    peak = 0.5 * (lo + hi);
  }
  const double curv = -d2g(peak);
  double scale = curv > 0.0 ? 1.0 / std::sqrt(curv) : peak;
  if (peak == 1.0 && dg(1.0) < 0.0) scale = std::min(scale, 1.0 / -dg(1.0));
  const double g_peak = g(peak);

  std::vector<double> br{1.0};
  for (const double j : {-64.0, -32.0, -16.0, -8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0,
                         64.0}) {
    const double v = peak + j * scale;
    if (v > 1.0) br.push_back(v);
    if (j > 0.0 && g(v) - g_peak < -50.0) break;
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  const double v_end = br.back();

  const double body = integrate_panels([&](double v) { return std::exp(g(v) - g_peak); }, br, kQuadTol,
                                       "paretolog binomial moment");
  const double u_end = std::pow(v_end, -alpha);
  const double tail = integrate(
      [&](double u) {
        if (u <= 0.0) return kd == 0.0 ? std::exp(lc - g_peak) : 0.0;
        return std::exp(mixed(std::pow(u, -1.0 / alpha)) - g_peak);
      },
      0.0, u_end, kQuadTol, "paretolog binomial moment tail", body);
  const double total = body + tail;
  return total > 0.0 ? g_peak + std::log(total) : -kInf;
}

}  // namespace

double FactorModel::log_binomial_moment(std::uint64_t n, std::uint64_t m) const {
  if (m > n) throw DomainError("binomial moment needs m <= n");
  const std::uint64_t k = n - m;
  return std::visit(
      Overloaded{
          [&](const BetaLaw& l) {
            // C(n,m) B(a+k, b+m) / B(a,b) as a product of gamma ratios.
            const double nd = static_cast<double>(n);
            const double kd = static_cast<double>(k);
            const double md = static_cast<double>(m);
            return log_gamma_ratio(nd + 1.0, l.a + l.b + nd) + log_gamma_ratio(l.a + kd, kd + 1.0) +
                   log_gamma_ratio(l.b + md, md + 1.0) + log_gamma(l.a + l.b) - log_gamma(l.a) -
                   log_gamma(l.b);
          },
          [&](const ParetoLogLaw& l) { return pareto_log_binomial_moment(l.alpha, n, m); },
          [&](const TabulatedLaw& l) {
            const double v = l.table->binomial_moment(n, m);
            return v > 0.0 ? std::log(v) : -kInf;
          },
      },
      law_);
}

double FactorModel::log_one_minus_power_moment(std::uint64_t n) const {
  if (n == 0) return -kInf;
  const double nd = static_cast<double>(n);
  return std::visit(
      Overloaded{
          [&](const BetaLaw& l) {
            const double log_ewn = log_gamma_ratio(l.a + nd, l.a + l.b + nd) + log_gamma_ratio(l.a + l.b, l.a);
            return log1mexp(log_ewn);
          },
          [&](const ParetoLogLaw& l) {
            const double alpha = l.alpha;
            const double v = integrate(
                [&](double u) {
                  if (u <= 0.0) return 1.0;
                  return -std::expm1(-nd * pareto_v(u, alpha));
                },
                0.0, 1.0, kQuadTol, "paretolog 1 - E W^n");
            return std::log(v);
          },
          [&](const TabulatedLaw& l) { return std::log(l.table->one_minus_power_moment(n)); },
      },
      law_);
}

}  // namespace stickperm
