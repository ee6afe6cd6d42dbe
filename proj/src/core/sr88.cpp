#include "core/sr88.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/wigner.hpp"

namespace pulselab {

namespace {

struct SeriesTraits {
  const char* label;
  int l;
  double L, S, J;  // term quantum numbers (one active electron, 5s spectator)
  double ritz[3];  // delta^(0), delta^(2), delta^(4)
  int ritz_min_n;
  int min_n;
};

const SeriesTraits& traits(Series s) {
  static const std::array<SeriesTraits, 3> table = {{
      {"3S1", 0, 0, 1, 1, {3.370778, 0.418, -0.3}, 15, 6},
      {"3P0", 1, 1, 1, 0, {2.883326, 0.255, 4.07}, 15, 5},
      {"3D1", 2, 2, 1, 1, {2.67517, -13.15, -4444.0}, 28, 4},
  }};
  return table[static_cast<int>(s)];
}

double laguerre(int degree, double alpha, double x) {
  if (degree == 0) return 1.0;
  double lm2 = 1.0;
  double lm1 = 1.0 + alpha - x;
  for (int m = 2; m <= degree; ++m) {
    const double lm = ((2.0 * m - 1.0 + alpha - x) * lm1 -
                       (m - 1.0 + alpha) * lm2) /
                      m;
    lm2 = lm1;
    lm1 = lm;
  }
  return lm1;
}

struct GslWorkspace {
  gsl_integration_workspace* w;
  GslWorkspace() : w(gsl_integration_workspace_alloc(4096)) {
    gsl_set_error_handler_off();
  }
  ~GslWorkspace() { gsl_integration_workspace_free(w); }
};

}  // namespace

const char* series_label(Series s) { return traits(s).label; }
int series_l(Series s) { return traits(s).l; }

int series_laguerre_offset(Series s, int n) {
  switch (s) {
    case Series::S3S1: return 4;
    case Series::P3P0: return 2;
    case Series::D3D1: return (n == 4 || n == 5) ? 0 : 2;
  }
  return 0;
}

int series_min_n(Series s) { return traits(s).min_n; }

Sr88Model Sr88Model::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open quantum-defect table: " + path);
  Sr88Model model;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::string series;
    int n;
    double delta;
    if (!(row >> series)) continue;  // blank line
    if (!(row >> n >> delta))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'series n delta'");
    Series s;
    if (series == "3S1") s = Series::S3S1;
    else if (series == "3P0" || series == "3P") s = Series::P3P0;
    else if (series == "3D1") s = Series::D3D1;
    else
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": unknown series '" + series + "'");
    model.add_defect(s, n, delta);
  }
  return model;
}

void Sr88Model::add_defect(Series s, int n, double delta) {
  defects_[{static_cast<int>(s), n}] = delta;
}

double Sr88Model::quantum_defect(Series s, int n) const {
  if (n < series_min_n(s))
    throw DataGapError(std::string(series_label(s)) + " has no level n=" +
                       std::to_string(n));
  const auto it = defects_.find({static_cast<int>(s), n});
  if (it != defects_.end()) return it->second;
  const SeriesTraits& t = traits(s);
  if (n >= t.ritz_min_n) {
    const double x = n - t.ritz[0];
    return t.ritz[0] + t.ritz[1] / (x * x) + t.ritz[2] / (x * x * x * x);
  }
  throw DataGapError(std::string("no quantum-defect data for ") +
                     series_label(s) + " n=" + std::to_string(n));
}

double Sr88Model::level_energy_ghz(Series s, int n) const {
  const double n_star = effective_n(s, n);
  return sr88_constants::ionization_ghz -
         sr88_constants::rydberg_ghz / (n_star * n_star);
}

Sr88Model::RadialParams Sr88Model::radial_params(Series s, int n) const {
  const int l = series_l(s);
  const int offset = series_laguerre_offset(s, n);
  const double delta = quantum_defect(s, n);
  RadialParams p;
  p.n_star = n - delta;
  p.l_star = l - delta + offset;
  p.degree = n - l - 1 - offset;
  if (p.degree < 0)
    throw DataGapError("negative Laguerre degree for " +
                       std::string(series_label(s)) + " n=" + std::to_string(n));
  if (!(p.l_star + 0.5 > 0.0))
    throw DataGapError("effective angular momentum constraint violated");
  // (1/n*^2) sqrt( (2Z)^3 Gamma(degree+1) / (2 Gamma(n* + l* + 1)) ), Z = 1.
  const double log_norm = 0.5 * (3.0 * std::log(2.0) + std::lgamma(p.degree + 1.0) -
                                 std::log(2.0) - std::lgamma(p.n_star + p.l_star + 1.0));
  p.norm = std::exp(log_norm) / (p.n_star * p.n_star);
  return p;
}

double Sr88Model::radial_value(const RadialParams& p, double r) const {
  const double x = 2.0 * r / p.n_star;
  return p.norm * std::pow(x, p.l_star) * std::exp(-0.5 * x) *
         laguerre(p.degree, 2.0 * p.l_star + 1.0, x);
}

std::vector<double> Sr88Model::radial_wavefunction(
    Series s, int n, std::span<const double> r) const {
  const RadialParams p = radial_params(s, n);
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = radial_value(p, r[i]);
  return out;
}

double Sr88Model::radial_integral(Series a, int na, Series b, int nb) const {
  const auto key = std::make_tuple(static_cast<int>(a), na,
                                   static_cast<int>(b), nb);
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    const auto it = cache_->values.find(key);
    if (it != cache_->values.end()) return it->second;
  }

  const RadialParams pa = radial_params(a, na);
  const RadialParams pb = radial_params(b, nb);
  struct Ctx {
    const Sr88Model* model;
    const RadialParams *pa, *pb;
  } ctx{this, &pa, &pb};
  gsl_function f;
  f.function = [](double r, void* raw) {
    const Ctx* c = static_cast<const Ctx*>(raw);
    return c->model->radial_value(*c->pa, r) * c->model->radial_value(*c->pb, r) *
           r * r * r;
  };
  f.params = &ctx;

  const double n_star_max = std::max(pa.n_star, pb.n_star);
  const double r_max = 4.0 * n_star_max * n_star_max;
  static thread_local GslWorkspace ws;
  double result = 0.0, abserr = 0.0;
  gsl_integration_qag(&f, 0.0, r_max, 1e-12, 1e-8, 4096, GSL_INTEG_GAUSS61,
                      ws.w, &result, &abserr);

  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->values.emplace(key, result);
  return result;
}

double Sr88Model::reduced_dipole(Series upper, int n_upper, Series lower,
                                 int n_lower) const {
  const int l_up = series_l(upper);
  const int l_lo = series_l(lower);
  if (std::abs(l_up - l_lo) != 1) return 0.0;
  const double angular = wigner_3j(l_up, 1, l_lo, 0, 0, 0);
  const double sign = (l_up % 2 == 0) ? 1.0 : -1.0;
  return sign * std::sqrt(2.0 * l_lo + 1.0) * angular *
         radial_integral(upper, n_upper, lower, n_lower);
}

namespace {

// Squared pair dipole element summed over final M and polarization, for one
// decay channel upper -> lower. The Clebsch-Gordan factor sums to one, so the
// result is the squared prefactor times the squared reduced element.
double pair_element_sq(const SeriesTraits& up, const SeriesTraits& lo,
                       double j_lower, double reduced) {
  const double l1 = 0.0;  // 5s spectator electron
  const double pref = std::sqrt((2.0 * lo.L + 1.0) * (2.0 * up.l + 1.0) *
                                (2.0 * up.J + 1.0) * (2.0 * up.L + 1.0));
  const double sixj_fine =
      wigner_6j(lo.L, lo.S, j_lower, up.J, 1.0, up.L);
  const double sixj_orbital =
      wigner_6j(lo.l, l1, lo.L, up.L, 1.0, up.l);
  const double amp = pref * sixj_fine * sixj_orbital * reduced;
  return amp * amp;
}

}  // namespace

DecayReport Sr88Model::decay_rate(Series s, int n) const {
  DecayReport report;
  report.series = s;
  report.n = n;
  const SeriesTraits& up = traits(s);
  const double e_upper = level_energy_ghz(s, n);

  // Lower terms reached by E1 selection rules. The fine structure of a lower
  // term is collapsed onto one quantum defect, so each member of the manifold
  // carries the same (J-independent) coupled-scheme weight; the multiplicity
  // counts the members. This counting reproduces the published 88Sr triplet
  // lifetimes, which a per-J statistical weighting does not.
  struct LowerSpec {
    Series series;
    double j_representative;
    int fs_multiplicity;
  };
  std::vector<LowerSpec> lowers;
  if (s == Series::S3S1) {
    lowers.push_back({Series::P3P0, 0.0, 3});  // 3P_{0,1,2}
  } else if (s == Series::P3P0) {
    lowers.push_back({Series::S3S1, 1.0, 1});
    lowers.push_back({Series::D3D1, 1.0, 3});  // 3D_{1,2,3}
  } else {
    lowers.push_back({Series::P3P0, 0.0, 3});
  }

  const double c_cubed = std::pow(constants::fine_structure_inv, 3.0);
  for (const LowerSpec& spec : lowers) {
    SeriesTraits lo = traits(spec.series);
    lo.J = spec.j_representative;
    for (int np = series_min_n(spec.series); np <= n + 3; ++np) {
      double e_lower;
      try {
        e_lower = level_energy_ghz(spec.series, np);
      } catch (const DataGapError&) {
        report.complete_coverage = false;
        report.missing.push_back(std::string(series_label(spec.series)) +
                                 " n=" + std::to_string(np));
        continue;
      }
      if (!(e_lower < e_upper)) continue;
      const double reduced = reduced_dipole(s, n, spec.series, np);
      const double d_sq = spec.fs_multiplicity *
                          pair_element_sq(up, lo, spec.j_representative, reduced);
      if (d_sq == 0.0) continue;
      const double omega_au = (e_upper - e_lower) / constants::hartree_ghz;
      const double rate_au =
          (4.0 / 3.0) * omega_au * omega_au * omega_au / c_cubed * d_sq;
      const double rate_si = rate_au / constants::atomic_time;
      report.channels.push_back(
          {spec.series, np, spec.j_representative, rate_si});
      report.rate += rate_si;
    }
  }
  report.lifetime = report.rate > 0.0 ? 1.0 / report.rate : 0.0;
  return report;
}

ScalingLaws Sr88Model::scaling_laws(int n) const {
  using namespace sr88_constants;
  ScalingLaws laws;
  const double n_star = effective_n(Series::S3S1, n);
  const double n_star_anchor = effective_n(Series::S3S1, c3_anchor_n);
  laws.c3 = c3_anchor_61 * std::pow(n_star / n_star_anchor, 4.0);

  const double d_n =
      reduced_dipole(Series::S3S1, n, Series::P3P0, qubit_p_level);
  const double d_anchor =
      reduced_dipole(Series::S3S1, c3_anchor_n, Series::P3P0, qubit_p_level);
  laws.rabi_factor = std::abs(d_n / d_anchor);

  const double transition_ghz =
      level_energy_ghz(Series::S3S1, n) -
      level_energy_ghz(Series::P3P0, qubit_p_level);
  laws.wavelength = constants::speed_of_light / (transition_ghz * 1e9);
  const double anchor_ghz =
      level_energy_ghz(Series::S3S1, c3_anchor_n) -
      level_energy_ghz(Series::P3P0, qubit_p_level);
  laws.keff_factor = transition_ghz / anchor_ghz;

  laws.gamma_r = decay_rate(Series::S3S1, n).rate;
  laws.gamma_rp = decay_rate(Series::P3P0, n).rate;
  return laws;
}

}  // namespace pulselab
