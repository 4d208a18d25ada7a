// Command-line front end: simulate synthetic multi-view data, recover the
// cross-view map, extract per-component cumulants, fit downstream models, and
// sweep experiment grids into CSV/JSON tables.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rca/rca.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

fs::path ensure_dir(const std::string& out) {
  fs::path p(out);
  if (!p.empty()) fs::create_directories(p);
  return p;
}

void write_matrix(const fs::path& dir, const std::string& name, const rca::Matrix& m) {
  rca::write_text_file((dir / name).string(), rca::matrix_to_csv(m));
}

void write_tensor(const fs::path& dir, const std::string& name, const rca::DenseTensor& t) {
  rca::write_text_file((dir / name).string(), rca::tensor_to_csv(t));
}

struct CommonFlags {
  std::string config_path;
  std::string out = ".";
  std::string arms;
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int t_max = 0;
  bool t_max_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_config = true) {
  if (with_config) cmd->add_option("--config", f.config_path, "JSON experiment config");
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_option("--format", f.format, "table format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "seed override")->each([&](const std::string&) {
    f.seed_set = true;
  });
  cmd->add_option("--arms", f.arms, "comma list from {true,rca,naive,cca}");
  cmd->add_option("--t-max", f.t_max, "highest cumulant order")->each([&](const std::string&) {
    f.t_max_set = true;
  });
}

rca::ExperimentConfig load_config(const CommonFlags& f) {
  rca::ExperimentConfig cfg;
  if (!f.config_path.empty())
    cfg = rca::config_from_json_text(rca::read_text_file(f.config_path));
  if (f.seed_set) cfg.seed = f.seed;
  if (f.t_max_set) cfg.t_max = f.t_max;
  if (!f.arms.empty()) cfg.arms = split_list(f.arms);
  return cfg;
}

void print_summary(const rca::RunReport& report, std::ostream& os) {
  os << "setting=" << rca::setting_name(report.config.setting) << " d=" << report.config.d
     << " n=" << report.config.n << " ratio=" << report.config.perturbation_ratio
     << " seed=" << report.config.seed << "\n";
  for (const auto& s : report.arms) {
    os << "  " << s.arm << ": ";
    if (s.successes > 0)
      os << "mse " << rca::format_double(s.mean_mse) << " +- " << rca::format_double(s.std_mse)
         << " (" << s.successes << " ok";
    else
      os << "(0 ok";
    if (s.failures > 0) os << ", " << s.failures << " failed";
    os << ")\n";
  }
}

int cmd_simulate(const CommonFlags& f) {
  rca::ExperimentConfig cfg = load_config(f);
  cfg.validate();
  const fs::path dir = ensure_dir(f.out);
  const rca::GeneratedData data = rca::generate(cfg, cfg.seed);
  rca::write_text_file((dir / "meta.json").string(), rca::config_to_json(cfg).dump(2) + "\n");
  if (cfg.setting == rca::Setting::general) {
    for (int i = 0; i < cfg.set_system.k; ++i)
      write_matrix(dir, "view_" + std::to_string(i + 1) + ".csv", data.views[i]);
    for (std::size_t j = 0; j < cfg.set_system.subsets.size(); ++j)
      for (int i : cfg.set_system.subsets[j])
        write_matrix(dir,
                     "map_" + std::to_string(j + 1) + "_" + std::to_string(i + 1) + ".csv",
                     data.true_maps[j][i]);
    std::cout << "wrote " << cfg.set_system.k << " views to " << dir.string() << "\n";
    return 0;
  }
  write_matrix(dir, "u.csv", data.u);
  write_matrix(dir, "v.csv", data.v);
  write_matrix(dir, "s1.csv", data.s1);
  write_matrix(dir, "a.csv", data.a);
  switch (cfg.setting) {
    case rca::Setting::pca:
      write_matrix(dir, "truth_vector.csv", rca::Matrix(data.truth_vec));
      break;
    case rca::Setting::regression:
    case rca::Setting::logistic:
    case rca::Setting::biomarker_sim:
      write_matrix(dir, "truth_vector.csv", rca::Matrix(data.truth_vec));
      write_matrix(dir, "y.csv", rca::Matrix(data.y));
      break;
    case rca::Setting::gmm:
      write_matrix(dir, "truth_centers.csv", data.truth_centers);
      break;
    case rca::Setting::ising:
      write_matrix(dir, "truth_couplings.csv", rca::Matrix(data.truth_couplings));
      break;
    default:
      break;
  }
  std::cout << "wrote u.csv, v.csv and ground truth to " << dir.string() << "\n";
  return 0;
}

int cmd_extract_a(const std::string& u_path, const std::string& v_path, int order,
                  double rank_tol, const CommonFlags& f) {
  const rca::Matrix u = rca::matrix_from_csv(rca::read_text_file(u_path));
  const rca::Matrix v = rca::matrix_from_csv(rca::read_text_file(v_path));
  const auto [a_hat, cond] = rca::estimate_A(u, v, rank_tol, order);
  const fs::path dir = ensure_dir(f.out);
  write_matrix(dir, "a_hat.csv", a_hat);
  rca::Json j;
  j["sigma4"] = cond.sigma4;
  j["sigma_A"] = cond.sigma_A;
  j["spectral_A"] = cond.spectral_A;
  j["radius_bound"] = cond.radius_bound;
  j["n_samples"] = cond.n_samples;
  rca::write_text_file((dir / "conditioning.json").string(), j.dump(2) + "\n");
  std::cout << "a_hat.csv written; sigma4=" << rca::format_double(cond.sigma4) << "\n";
  return 0;
}

int cmd_extract_cumulants(const std::string& u_path, const std::string& v_path,
                          const std::string& a_path, bool estimate_a,
                          const std::string& views_list, const std::string& system_path,
                          const CommonFlags& f) {
  const fs::path dir = ensure_dir(f.out);
  if (!views_list.empty() || !system_path.empty()) {
    if (views_list.empty() || system_path.empty())
      throw rca::invalid_input("extract-cumulants: --views and --system go together");
    std::vector<rca::Matrix> views;
    for (const auto& path : split_list(views_list))
      views.push_back(rca::matrix_from_csv(rca::read_text_file(path)));
    const rca::SetSystem sys =
        rca::set_system_from_json(rca::Json::parse(rca::read_text_file(system_path)));
    const rca::GeneralExtraction ext = rca::find_linear(views, sys);
    const int t_max = f.t_max_set ? f.t_max : ext.L + 1;
    rca::Json meta;
    meta["L"] = ext.L;
    for (std::size_t j = 0; j < sys.subsets.size(); ++j) {
      rca::Json cj;
      cj["zero"] = ext.zero[j];
      rca::Json t = rca::Json::array();
      for (int i : ext.T[j]) t.push_back(i + 1);
      cj["T"] = std::move(t);
      meta["components"].push_back(std::move(cj));
      if (ext.zero[j]) continue;
      for (int i : sys.subsets[j])
        write_matrix(dir, "map_" + std::to_string(j + 1) + "_" + std::to_string(i + 1) + ".csv",
                     ext.maps[j][i]);
    }
    for (int t = std::max(2, ext.L); t <= t_max; ++t) {
      const auto kappas = rca::compute_cumulants(views, sys, ext, t);
      for (std::size_t j = 0; j < kappas.size(); ++j)
        if (!ext.zero[j])
          write_tensor(dir, "s" + std::to_string(j + 1) + "_k" + std::to_string(t) + ".csv",
                       kappas[j]);
    }
    rca::write_text_file((dir / "extraction.json").string(), meta.dump(2) + "\n");
    std::cout << "component maps and cumulants written to " << dir.string() << "\n";
    return 0;
  }
  if (u_path.empty() || v_path.empty())
    throw rca::invalid_input("extract-cumulants: need --u and --v (or --views/--system)");
  const rca::Matrix u = rca::matrix_from_csv(rca::read_text_file(u_path));
  const rca::Matrix v = rca::matrix_from_csv(rca::read_text_file(v_path));
  rca::Matrix a;
  if (estimate_a) {
    a = rca::estimate_A(u, v).first;
    write_matrix(dir, "a_hat.csv", a);
  } else if (!a_path.empty()) {
    a = rca::matrix_from_csv(rca::read_text_file(a_path));
  } else {
    throw rca::invalid_input("extract-cumulants: need --a <file> or --estimate-a");
  }
  const int t_max = f.t_max_set ? f.t_max : 4;
  const rca::ComponentCumulants ext = rca::extract_cumulants(u, v, a, t_max);
  for (int t = 2; t <= t_max; ++t) {
    write_tensor(dir, "s1_k" + std::to_string(t) + ".csv", ext.of(1, t));
    write_tensor(dir, "s2_k" + std::to_string(t) + ".csv", ext.of(2, t));
    write_tensor(dir, "s3_k" + std::to_string(t) + ".csv", ext.of(3, t));
  }
  std::cout << "component cumulants for orders 2.." << t_max << " written to " << dir.string()
            << "\n";
  return 0;
}

int cmd_fit(const std::string& setting, const CommonFlags& f) {
  rca::ExperimentConfig cfg = load_config(f);
  if (!setting.empty()) cfg.setting = rca::setting_from_name(setting);
  const rca::RunReport report = rca::run(cfg);
  const fs::path dir = ensure_dir(f.out);
  rca::write_text_file((dir / "report.json").string(),
                       rca::report_to_json(report).dump(2) + "\n");
  rca::write_text_file((dir / "report.csv").string(), rca::report_to_csv(report));
  if (f.format == "json")
    std::cout << rca::report_to_json(report).dump(2) << "\n";
  else
    print_summary(report, std::cout);
  return 0;
}

int cmd_sweep(const CommonFlags& f) {
  if (f.config_path.empty()) throw rca::invalid_input("sweep: --config required");
  std::vector<rca::ExperimentConfig> configs =
      rca::sweep_configs_from_json_text(rca::read_text_file(f.config_path));
  for (auto& cfg : configs) {
    if (f.seed_set) cfg.seed = f.seed;
    if (f.t_max_set) cfg.t_max = f.t_max;
    if (!f.arms.empty()) cfg.arms = split_list(f.arms);
  }
  const std::vector<rca::RunReport> reports = rca::sweep(configs);
  const fs::path dir = ensure_dir(f.out);
  rca::Json all = rca::Json::array();
  for (const auto& r : reports) all.push_back(rca::report_to_json(r));
  rca::write_text_file((dir / "sweep.json").string(), all.dump(2) + "\n");
  rca::write_text_file((dir / "sweep.csv").string(), rca::reports_to_csv(reports));
  if (f.format == "json")
    std::cout << all.dump(2) << "\n";
  else
    std::cout << rca::reports_to_csv(reports);
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const CommonFlags& f) {
  // Re-tabulate stored report JSON (single report or sweep array).
  std::ostringstream csv;
  csv << "setting,d,n,perturbation_ratio,seed,arm,mean_mse,std_mse,successes,failures\n";
  rca::Json merged = rca::Json::array();
  for (const auto& path : inputs) {
    rca::Json j;
    try {
      j = rca::Json::parse(rca::read_text_file(path));
    } catch (const rca::Json::exception& e) {
      throw rca::invalid_input(std::string("report: ") + e.what());
    }
    const rca::Json list = j.is_array() ? j : rca::Json::array({j});
    for (const auto& rep : list) {
      merged.push_back(rep);
      try {
        const auto& cfg = rep.at("config");
        for (const auto& s : rep.at("summary"))
          csv << cfg.at("setting").get<std::string>() << "," << cfg.at("d").get<int>() << ","
              << cfg.at("n").get<int>() << ","
              << rca::format_double(cfg.at("perturbation_ratio").get<double>()) << ","
              << cfg.at("seed").get<std::uint64_t>() << "," << s.at("arm").get<std::string>()
              << "," << rca::format_double(s.at("mean_mse").get<double>()) << ","
              << rca::format_double(s.at("std_mse").get<double>()) << ","
              << s.at("successes").get<int>() << "," << s.at("failures").get<int>() << "\n";
      } catch (const rca::Json::exception& e) {
        throw rca::invalid_input(std::string("report: malformed report file ") + path + ": " +
                                 e.what());
      }
    }
  }
  if (f.format == "json")
    std::cout << merged.dump(2) << "\n";
  else
    std::cout << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cumulant-based component separation for multi-view data"};
  app.require_subcommand(1);

  CommonFlags sim_f, ea_f, ec_f, fit_f, sweep_f, rep_f;
  std::string ea_u, ea_v, ec_u, ec_v, ec_a, ec_views, ec_system, fit_setting;
  std::vector<std::string> rep_inputs;
  int ea_order = 4;
  double ea_rank_tol = 1e-10;
  bool ec_estimate_a = false;

  CLI::App* sim = app.add_subcommand("simulate", "generate seeded synthetic views");
  add_common(sim, sim_f);

  CLI::App* ea = app.add_subcommand("extract-a", "recover the cross-view map from samples");
  ea->add_option("--u", ea_u, "first-view sample matrix CSV")->required();
  ea->add_option("--v", ea_v, "second-view sample matrix CSV")->required();
  ea->add_option("--order", ea_order, "cumulant order for recovery (3 or 4)")
      ->check(CLI::IsMember({3, 4}))
      ->capture_default_str();
  ea->add_option("--rank-tol", ea_rank_tol, "relative pseudoinverse cutoff")
      ->capture_default_str();
  add_common(ea, ea_f, false);

  CLI::App* ec = app.add_subcommand("extract-cumulants", "per-component cumulant tensors");
  ec->add_option("--u", ec_u, "first-view sample matrix CSV");
  ec->add_option("--v", ec_v, "second-view sample matrix CSV");
  ec->add_option("--a", ec_a, "known cross-view map CSV");
  ec->add_flag("--estimate-a", ec_estimate_a, "estimate the map instead of reading it");
  ec->add_option("--views", ec_views, "comma list of view CSVs (general set system)");
  ec->add_option("--system", ec_system, "set-system JSON (general)");
  add_common(ec, ec_f, false);

  CLI::App* fit = app.add_subcommand("fit", "run experiment arms for one setting");
  fit->add_option("setting", fit_setting,
                  "pca|regression|gmm|logistic|ising|general|biomarker_sim");
  add_common(fit, fit_f);

  CLI::App* sw = app.add_subcommand("sweep", "run a grid of experiment configs");
  add_common(sw, sweep_f);

  CLI::App* rep = app.add_subcommand("report", "re-tabulate stored report JSON");
  rep->add_option("inputs", rep_inputs, "report.json / sweep.json files")->required();
  add_common(rep, rep_f, false);

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return cmd_simulate(sim_f);
    if (ea->parsed()) return cmd_extract_a(ea_u, ea_v, ea_order, ea_rank_tol, ea_f);
    if (ec->parsed())
      return cmd_extract_cumulants(ec_u, ec_v, ec_a, ec_estimate_a, ec_views, ec_system, ec_f);
    if (fit->parsed()) return cmd_fit(fit_setting, fit_f);
    if (sw->parsed()) return cmd_sweep(sweep_f);
    if (rep->parsed()) return cmd_report(rep_inputs, rep_f);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const rca::convergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const rca::degenerate_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const rca::invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
