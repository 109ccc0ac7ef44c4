#ifndef RINGCHAIN_EXPERIMENTS_HPP
#define RINGCHAIN_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ringchain/chain_blocks.hpp"
#include "ringchain/core.hpp"
#include "ringchain/dephasing.hpp"
#include "ringchain/dynamics.hpp"
#include "ringchain/hamiltonian.hpp"
#include "ringchain/perturbation.hpp"
#include "ringchain/ring_spectrum.hpp"

namespace ringchain {

enum class Experiment {
  spectrum_compare,
  eigvec_compare,
  evolve,
  efficiency_sweep,
  dephasing_sweep,
  closed_forms,
  decomposition_check,
};

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::spectrum_compare: return "spectrum_compare";
    case Experiment::eigvec_compare: return "eigvec_compare";
    case Experiment::evolve: return "evolve";
    case Experiment::efficiency_sweep: return "efficiency_sweep";
    case Experiment::dephasing_sweep: return "dephasing_sweep";
    case Experiment::closed_forms: return "closed_forms";
    case Experiment::decomposition_check: return "decomposition_check";
  }
  throw validation_error("unknown experiment enum value");
}

inline Experiment experiment_from_string(const std::string& s) {
  for (Experiment e : {Experiment::spectrum_compare, Experiment::eigvec_compare,
                       Experiment::evolve, Experiment::efficiency_sweep,
                       Experiment::dephasing_sweep, Experiment::closed_forms,
                       Experiment::decomposition_check})
    if (to_string(e) == s) return e;
  throw validation_error("unknown experiment '" + s + "'");
}

inline std::string to_string(InitialCondition ic) {
  switch (ic) {
    case InitialCondition::localized_axis: return "localized_axis";
    case InitialCondition::delocalized_k1: return "delocalized_k1";
    case InitialCondition::localized_off_axis: return "localized_off_axis";
  }
  throw validation_error("unknown initial condition enum value");
}

inline InitialCondition initial_condition_from_string(const std::string& s) {
  for (InitialCondition ic :
       {InitialCondition::localized_axis, InitialCondition::delocalized_k1,
        InitialCondition::localized_off_axis})
    if (to_string(ic) == s) return ic;
  throw validation_error("unknown initial condition '" + s + "'");
}

/// Declarative description of one experiment run; maps 1:1 onto the
/// INI-style config files under configs/.
struct RunConfig {
  Experiment experiment = Experiment::evolve;

  // [spec]
  int n_rings = 4;
  int n_dimers = 8;
  double site_energy = 0.0;
  double j_intra = 320.0;
  double j_inter = 255.0;

  // [run]
  std::vector<double> xi_list = {0.0625};
  std::vector<double> gamma_list = {};  // Gamma / J2 values for dephasing_sweep
  InitialCondition initial = InitialCondition::localized_axis;
  int n_samples = 2000;
  double span = 3.0;
  double prominence = 0.01;

  // [pair] second-order doublet pair for closed_forms
  int pair_k1 = 1;
  int pair_k2 = 3;
  int pair_sigma = 1;
  int pair_rho = 1;

  // [grid] decomposition_check sweeps
  std::vector<int> grid_n_rings = {1, 2, 3, 4, 5, 6};
  std::vector<int> grid_n_dimers = {2, 4, 8, 9};

  bool operator==(const RunConfig&) const = default;

  RingGeometry geometry() const {
    return RingGeometry(n_dimers, site_energy, j_intra, j_inter);
  }
  AggregateSpec spec_for_xi(double xi, UnitConvention units = {}) const {
    return AggregateSpec(geometry(), n_rings, xi * j_inter, units);
  }

  void validate() const {
    geometry();
    if (n_rings < 1) throw validation_error("RunConfig: n_rings must be >= 1");
    if (n_samples < 2) throw validation_error("RunConfig: n_samples must be >= 2");
    if (span <= 0.0) throw validation_error("RunConfig: span must be > 0");
    if (prominence < 0.0) throw validation_error("RunConfig: prominence must be >= 0");
    if (xi_list.empty()) throw validation_error("RunConfig: xi_list must be non-empty");
    for (double g : gamma_list)
      if (g < 0.0) throw validation_error("RunConfig: gamma values must be >= 0");
    for (int nr : grid_n_rings)
      if (nr < 1) throw validation_error("RunConfig: grid n_rings must be >= 1");
    for (int nd : grid_n_dimers)
      if (nd < 2) throw validation_error("RunConfig: grid n_dimers must be >= 2");
  }
};

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <class T>
std::string join_list(const std::vector<T>& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  return os.str();
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_double_list(s)) out.push_back(static_cast<int>(std::lround(v)));
  return out;
}

}  // namespace detail

inline void serialize_config(const RunConfig& c, std::ostream& os) {
  os << "[experiment]\n"
     << "type = " << to_string(c.experiment) << "\n\n"
     << "[spec]\n"
     << "n_rings = " << c.n_rings << "\n"
     << "n_dimers = " << c.n_dimers << "\n"
     << "site_energy = " << detail::format_double(c.site_energy) << "\n"
     << "j_intra = " << detail::format_double(c.j_intra) << "\n"
     << "j_inter = " << detail::format_double(c.j_inter) << "\n\n"
     << "[run]\n"
     << "xi_list = " << detail::join_list(c.xi_list) << "\n"
     << "gamma_list = " << detail::join_list(c.gamma_list) << "\n"
     << "initial = " << to_string(c.initial) << "\n"
     << "n_samples = " << c.n_samples << "\n"
     << "span = " << detail::format_double(c.span) << "\n"
     << "prominence = " << detail::format_double(c.prominence) << "\n\n"
     << "[pair]\n"
     << "k1 = " << c.pair_k1 << "\n"
     << "k2 = " << c.pair_k2 << "\n"
     << "sigma = " << c.pair_sigma << "\n"
     << "rho = " << c.pair_rho << "\n\n"
     << "[grid]\n"
     << "n_rings_list = " << detail::join_list(c.grid_n_rings) << "\n"
     << "n_dimers_list = " << detail::join_list(c.grid_n_dimers) << "\n";
}

inline RunConfig parse_config(std::istream& is) {
  RunConfig c;
  std::map<std::string, std::string> kv;
  std::string line, section;
  while (std::getline(is, line)) {
    line = detail::trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error("config: malformed line '" + line + "'");
    kv[section + "." + detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  auto get = [&](const std::string& key, auto&& apply) {
    const auto it = kv.find(key);
    if (it != kv.end()) apply(it->second);
  };
  get("experiment.type", [&](const std::string& v) { c.experiment = experiment_from_string(v); });
  get("spec.n_rings", [&](const std::string& v) { c.n_rings = std::stoi(v); });
  get("spec.n_dimers", [&](const std::string& v) { c.n_dimers = std::stoi(v); });
  get("spec.site_energy", [&](const std::string& v) { c.site_energy = std::stod(v); });
  get("spec.j_intra", [&](const std::string& v) { c.j_intra = std::stod(v); });
  get("spec.j_inter", [&](const std::string& v) { c.j_inter = std::stod(v); });
  get("run.xi_list", [&](const std::string& v) { c.xi_list = detail::parse_double_list(v); });
  get("run.gamma_list",
      [&](const std::string& v) { c.gamma_list = detail::parse_double_list(v); });
  get("run.initial", [&](const std::string& v) { c.initial = initial_condition_from_string(v); });
  get("run.n_samples", [&](const std::string& v) { c.n_samples = std::stoi(v); });
  get("run.span", [&](const std::string& v) { c.span = std::stod(v); });
  get("run.prominence", [&](const std::string& v) { c.prominence = std::stod(v); });
  get("pair.k1", [&](const std::string& v) { c.pair_k1 = std::stoi(v); });
  get("pair.k2", [&](const std::string& v) { c.pair_k2 = std::stoi(v); });
  get("pair.sigma", [&](const std::string& v) { c.pair_sigma = std::stoi(v); });
  get("pair.rho", [&](const std::string& v) { c.pair_rho = std::stoi(v); });
  get("grid.n_rings_list",
      [&](const std::string& v) { c.grid_n_rings = detail::parse_int_list(v); });
  get("grid.n_dimers_list",
      [&](const std::string& v) { c.grid_n_dimers = detail::parse_int_list(v); });
  c.validate();
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw validation_error("cannot read config file " + path.string());
  return parse_config(is);
}

/// Canonical initial states used by the trajectory experiments.
inline QuantumState make_initial_state(const AggregateSpec& spec, InitialCondition init) {
  const int nd = spec.ring.n_dimers;
  switch (init) {
    case InitialCondition::localized_axis: {
      Vector v = Vector::Zero(spec.dim());
      v(flatten(SiteIndex{1, nd / 2, 1}, spec)) = 1.0;
      return QuantumState(std::move(v));
    }
    case InitialCondition::localized_off_axis: {
      Vector v = Vector::Zero(spec.dim());
      v(flatten(SiteIndex{1, 1, 1}, spec)) = 1.0;
      return QuantumState(std::move(v));
    }
    case InitialCondition::delocalized_k1: {
      Vector v = Vector::Zero(spec.dim());
      v.head(spec.ring.n_sites()) = ring_eigenstate(spec.ring, {1, 1}).amplitudes;
      return QuantumState(std::move(v));
    }
  }
  throw validation_error("unknown initial condition enum value");
}

namespace detail {

/// Runs tasks over a fixed-size pool; results land in index order regardless
/// of completion order.
inline void parallel_for(int n_tasks, int jobs, const std::function<void(int)>& task) {
  if (jobs < 1) throw validation_error("jobs must be >= 1");
  if (jobs == 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::min(jobs, n_tasks); ++j) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::string value_tag(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  std::string s = os.str();
  for (char& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

inline std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw validation_error("cannot write output file " + path.string());
  os << std::setprecision(12);
  return os;
}

}  // namespace detail

/// Everything run() produced: file list plus the machine-readable summary.
struct RunResult {
  std::vector<std::filesystem::path> outputs;
  nlohmann::json summary;
};

inline RunResult run(const RunConfig& config, const std::filesystem::path& out_dir,
                     int jobs = 1, UnitMode units = UnitMode::dimensionless) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  const bool ps = units == UnitMode::picoseconds;
  const UnitConvention conv{units};
  RunResult result;
  nlohmann::json& summary = result.summary;
  summary["experiment"] = to_string(config.experiment);

  auto emit = [&](const std::filesystem::path& p) { result.outputs.push_back(p); };

  switch (config.experiment) {
    case Experiment::spectrum_compare: {
      std::vector<double> errors(config.xi_list.size());
      std::vector<std::vector<SpectrumComparisonRow>> all_rows(config.xi_list.size());
      detail::parallel_for(
          static_cast<int>(config.xi_list.size()), jobs, [&](int i) {
            const AggregateSpec spec = config.spec_for_xi(config.xi_list[i], conv);
            all_rows[i] = perturbative_vs_exact(spec);
            double max_err = 0.0;
            for (const SpectrumComparisonRow& r : all_rows[i])
              if (r.label.rho == 1) max_err = std::max(max_err, r.rel_error);
            errors[i] = max_err;
          });
      for (size_t i = 0; i < config.xi_list.size(); ++i) {
        const auto path =
            out_dir / ("spectrum_compare_xi_" + detail::value_tag(config.xi_list[i]) + ".csv");
        auto os = detail::open_csv(path);
        write_spectrum_comparison_csv(all_rows[i], os);
        emit(path);
        summary["max_rel_error_rho1"][detail::format_double(config.xi_list[i])] = errors[i];
      }
      break;
    }

    case Experiment::eigvec_compare: {
      const AggregateSpec spec = config.spec_for_xi(config.xi_list.front(), conv);
      Eigen::SelfAdjointEigenSolver<Matrix> es(
          build_aggregate_hamiltonian(spec).entries());
      const auto overlap_path = out_dir / "eigvec_overlaps.csv";
      auto os = detail::open_csv(overlap_path);
      os << "rho,k,sigma,nu,overlap\n";
      double ground_overlap = 0.0;
      double min_overlap = 1.0;
      const Vector ground = es.eigenvectors().col(0);
      for (int rho = 1; rho <= spec.n_rings; ++rho) {
        for (int sigma : {1, 2}) {
          for (int k = 1; k <= doublet_k_max(spec.ring.n_dimers); ++k) {
            for (int nu : {1, 2}) {
              const QuantumState adapted = adapted_eigenstate(spec, {rho, k, sigma, nu});
              // Best match over the exact basis handles near-degenerate swaps.
              double best = 0.0;
              int best_col = 0;
              for (int col = 0; col < spec.dim(); ++col) {
                const double o =
                    std::abs((es.eigenvectors().col(col).adjoint() * adapted.amplitudes)(0));
                if (o > best) {
                  best = o;
                  best_col = col;
                }
              }
              os << rho << ',' << k << ',' << sigma << ',' << nu << ',' << best << '\n';
              min_overlap = std::min(min_overlap, best);
              if (best_col == 0)
                ground_overlap =
                    std::abs((ground.adjoint() * adapted.amplitudes)(0));
            }
          }
        }
      }
      emit(overlap_path);
      const auto amp_path = out_dir / "eigvec_amplitudes.csv";
      auto amp_os = detail::open_csv(amp_path);
      amp_os << "state_index,flat_site,ring,dimer,pigment,re,im,abs\n";
      for (int col = 0; col < std::min(spec.dim(), 4); ++col)
        for (int i = 0; i < spec.dim(); ++i) {
          const SiteIndex site = unflatten(i, spec);
          const Complex a = es.eigenvectors()(i, col);
          amp_os << col << ',' << i << ',' << site.ring << ',' << site.dimer << ','
                 << site.pigment << ',' << a.real() << ',' << a.imag() << ','
                 << std::abs(a) << '\n';
        }
      emit(amp_path);
      summary["min_best_overlap"] = min_overlap;
      summary["ground_state_overlap"] = ground_overlap;
      break;
    }

    case Experiment::evolve: {
      const int n = static_cast<int>(config.xi_list.size());
      std::vector<Trajectory> trajs(n);
      std::vector<TransferMetrics> metrics(n);
      detail::parallel_for(n, jobs, [&](int i) {
        const AggregateSpec spec = config.spec_for_xi(config.xi_list[i], conv);
        const std::vector<double> taus =
            default_time_grid(spec, config.n_samples, config.span);
        trajs[i] = evolve_unitary(spec, make_initial_state(spec, config.initial), taus);
        metrics[i] = transfer_metrics(trajs[i], spec.n_rings, config.prominence);
      });
      std::vector<double> xi_tau;
      for (int i = 0; i < n; ++i) {
        const auto path =
            out_dir / ("evolve_xi_" + detail::value_tag(config.xi_list[i]) + ".csv");
        auto os = detail::open_csv(path);
        write_trajectory_csv(trajs[i], os, ps);
        emit(path);
        nlohmann::json entry;
        entry["xi"] = config.xi_list[i];
        entry["peak_found"] = metrics[i].found;
        entry["peak_value"] = metrics[i].peak_value;
        entry["peak_tau"] = metrics[i].peak_time;
        entry["peak_t_ps"] = metrics[i].peak_time * kHbarCmPs / config.j_inter;
        summary["peaks"].push_back(entry);
        if (metrics[i].found) xi_tau.push_back(config.xi_list[i] * metrics[i].peak_time);
      }
      if (!xi_tau.empty()) {
        const auto [lo, hi] = std::minmax_element(xi_tau.begin(), xi_tau.end());
        summary["xi_tau_peak_spread"] = (*hi - *lo) / *hi;
      }
      break;
    }

    case Experiment::efficiency_sweep: {
      const int n = static_cast<int>(config.xi_list.size());
      std::vector<TransferMetrics> metrics(n);
      detail::parallel_for(n, jobs, [&](int i) {
        const AggregateSpec spec = config.spec_for_xi(config.xi_list[i], conv);
        const std::vector<double> taus =
            default_time_grid(spec, config.n_samples, config.span);
        const Trajectory traj =
            evolve_unitary(spec, make_initial_state(spec, config.initial), taus);
        metrics[i] = transfer_metrics(traj, spec.n_rings, config.prominence);
      });
      const auto path = out_dir / "efficiency_sweep.csv";
      auto os = detail::open_csv(path);
      os << "xi,peak_found,peak_value,peak_tau" << (ps ? ",peak_t_ps" : "") << '\n';
      for (int i = 0; i < n; ++i) {
        os << config.xi_list[i] << ',' << (metrics[i].found ? 1 : 0) << ','
           << metrics[i].peak_value << ',' << metrics[i].peak_time;
        if (ps) os << ',' << metrics[i].peak_time * kHbarCmPs / config.j_inter;
        os << '\n';
      }
      emit(path);
      for (int i = 0; i < n; ++i) {
        nlohmann::json entry;
        entry["xi"] = config.xi_list[i];
        entry["peak_value"] = metrics[i].peak_value;
        entry["peak_tau"] = metrics[i].peak_time;
        summary["peaks"].push_back(entry);
      }
      break;
    }

    case Experiment::dephasing_sweep: {
      if (config.gamma_list.empty())
        throw validation_error("dephasing_sweep: gamma_list must be non-empty");
      struct Point {
        double gamma;
        double xi;
      };
      std::vector<Point> points;
      for (double g : config.gamma_list)
        for (double xi : config.xi_list) points.push_back({g, xi});
      const int n = static_cast<int>(points.size());
      std::vector<Trajectory> trajs(n);
      std::vector<TransferMetrics> metrics(n);
      detail::parallel_for(n, jobs, [&](int i) {
        const AggregateSpec spec = config.spec_for_xi(points[i].xi, conv);
        const std::vector<double> taus =
            default_time_grid(spec, config.n_samples, config.span);
        DephasingConfig dcfg;
        dcfg.gamma = points[i].gamma;
        trajs[i] = evolve_dephasing(spec,
                                    pure_density(make_initial_state(spec, config.initial)),
                                    taus, dcfg);
        metrics[i] = transfer_metrics(trajs[i], spec.n_rings, config.prominence);
      });
      for (int i = 0; i < n; ++i) {
        const auto path = out_dir / ("dephasing_gamma_" + detail::value_tag(points[i].gamma) +
                                     "_xi_" + detail::value_tag(points[i].xi) + ".csv");
        auto os = detail::open_csv(path);
        os << "tau" << (ps ? ",t_ps" : "");
        const int n_rings = config.n_rings;
        for (int r = 1; r <= n_rings; ++r) os << ",P_" << r;
        os << ",gamma_over_J2,xi\n";
        for (size_t s = 0; s < trajs[i].taus.size(); ++s) {
          os << trajs[i].taus[s];
          if (ps) os << ',' << trajs[i].t_ps[s];
          for (double p : trajs[i].populations[s]) os << ',' << p;
          os << ',' << points[i].gamma << ',' << points[i].xi << '\n';
        }
        emit(path);
        nlohmann::json entry;
        entry["gamma_over_J2"] = points[i].gamma;
        entry["xi"] = points[i].xi;
        entry["peak_value"] = metrics[i].peak_value;
        entry["peak_tau"] = metrics[i].peak_time;
        summary["peaks"].push_back(entry);
      }
      break;
    }

    case Experiment::closed_forms: {
      const AggregateSpec spec = config.spec_for_xi(config.xi_list.front(), conv);
      const double alpha = 2.0 / spec.ring.n_dimers;
      const MixedPair pair =
          mixed_pair(spec, config.pair_k1, config.pair_k2, config.pair_sigma,
                     config.pair_rho);
      const double x_peak = f_profile_peak(spec.n_rings);
      const auto profile_path = out_dir / "f_profile.csv";
      {
        auto os = detail::open_csv(profile_path);
        os << "x,f,df,d2f\n";
        const double x_hi = 2.0 * x_peak;
        for (int i = 0; i < config.n_samples; ++i) {
          const double x = x_hi * i / (config.n_samples - 1);
          const ProfileValue p = f_profile(spec.n_rings, x);
          os << x << ',' << p.f << ',' << p.df << ',' << p.d2f << '\n';
        }
      }
      emit(profile_path);
      const auto curves_path = out_dir / "closed_form_populations.csv";
      {
        auto os = detail::open_csv(curves_path);
        os << "tau" << (ps ? ",t_ps" : "")
           << ",p_loc_first,p_del_first,p_second_order\n";
        const std::vector<double> taus =
            default_time_grid(spec, config.n_samples, config.span);
        for (double tau : taus) {
          os << tau;
          if (ps) os << ',' << tau * kHbarCmPs / config.j_inter;
          os << ',' << p_last_first_order(spec, tau, InitialCondition::localized_axis)
             << ',' << p_last_first_order(spec, tau, InitialCondition::delocalized_k1)
             << ',' << p_last_second_order(spec, pair, tau) << '\n';
        }
      }
      emit(curves_path);
      summary["x_peak"] = x_peak;
      summary["f_peak"] = f_profile(spec.n_rings, x_peak).f;
      summary["f_second_derivative_at_peak"] = f_profile(spec.n_rings, x_peak).d2f;
      summary["tau_est"] = x_peak / (alpha * spec.xi());
      summary["pair_delta"] = pair.delta;
      summary["pair_theta_rho"] = pair.theta_rho;
      break;
    }

    case Experiment::decomposition_check: {
      struct Point {
        int n_rings;
        int n_dimers;
        double xi;
      };
      std::vector<Point> points;
      for (int nr : config.grid_n_rings)
        for (int nd : config.grid_n_dimers)
          for (double xi : config.xi_list) points.push_back({nr, nd, xi});
      const int n = static_cast<int>(points.size());
      std::vector<DecompositionReport> reports(n);
      detail::parallel_for(n, jobs, [&](int i) {
        const RingGeometry geom(points[i].n_dimers, config.site_energy, config.j_intra,
                                config.j_inter);
        const AggregateSpec spec(geom, points[i].n_rings,
                                 points[i].xi * config.j_inter, conv);
        reports[i] = verify_decomposition(spec);
      });
      const auto path = out_dir / "decomposition_check.csv";
      auto os = detail::open_csv(path);
      os << "n_rings,n_dimers,xi,max_deviation\n";
      double worst = 0.0;
      for (int i = 0; i < n; ++i) {
        os << points[i].n_rings << ',' << points[i].n_dimers << ',' << points[i].xi
           << ',' << reports[i].max_deviation << '\n';
        worst = std::max(worst, reports[i].max_deviation);
      }
      emit(path);
      summary["max_deviation"] = worst;
      summary["all_within_1e-8"] = worst <= 1e-8;
      break;
    }
  }

  const auto summary_path = out_dir / (to_string(config.experiment) + "_summary.json");
  std::ofstream sos(summary_path);
  sos << summary.dump(2) << '\n';
  result.outputs.push_back(summary_path);
  return result;
}

/// Column-wise golden-file comparison.
struct GoldenReport {
  bool pass = false;
  bool schema_match = false;
  std::vector<std::string> columns;
  std::vector<double> max_abs_diff;
  std::vector<std::string> violations;
};

namespace detail {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw validation_error("cannot read CSV file " + path.string());
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = cells;
      first = false;
    } else {
      t.rows.push_back(cells);
    }
  }
  return t;
}

}  // namespace detail

inline GoldenReport compare_golden(const std::filesystem::path& output,
                                   const std::filesystem::path& golden,
                                   double tolerance = 1e-9) {
  const detail::CsvTable a = detail::read_csv(output);
  const detail::CsvTable b = detail::read_csv(golden);
  GoldenReport report;
  report.schema_match = (a.header == b.header) && (a.rows.size() == b.rows.size());
  if (!report.schema_match)
    throw validation_error("golden comparison: schema mismatch between " +
                           output.string() + " and " + golden.string());
  report.columns = a.header;
  report.max_abs_diff.assign(a.header.size(), 0.0);
  for (size_t r = 0; r < a.rows.size(); ++r) {
    if (a.rows[r].size() != a.header.size() || b.rows[r].size() != b.header.size())
      throw validation_error("golden comparison: ragged row " + std::to_string(r));
    for (size_t c = 0; c < a.header.size(); ++c) {
      double diff;
      try {
        diff = std::abs(std::stod(a.rows[r][c]) - std::stod(b.rows[r][c]));
      } catch (const std::exception&) {
        diff = (a.rows[r][c] == b.rows[r][c]) ? 0.0 : tolerance * 2.0;
      }
      report.max_abs_diff[c] = std::max(report.max_abs_diff[c], diff);
    }
  }
  report.pass = true;
  for (size_t c = 0; c < report.columns.size(); ++c) {
    if (report.max_abs_diff[c] > tolerance) {
      report.pass = false;
      report.violations.push_back(report.columns[c]);
    }
  }
  return report;
}

}  // namespace ringchain

#endif
