// Command-line front end: model loading, named computations, the full
// verification suite, CSV/JSON reports.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "taskinfo/bounds.hpp"
#include "taskinfo/config.hpp"
#include "taskinfo/fisher.hpp"
#include "taskinfo/observer.hpp"
#include "taskinfo/report.hpp"
#include "taskinfo/suite.hpp"
#include "taskinfo/tv.hpp"

namespace {

using taskinfo::McOptions;
using taskinfo::bounds::Verdict;
using json = nlohmann::json;

struct CommonArgs {
  std::string model = "scalar-default";
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  std::uint64_t samples = 100000;
  int jobs = 0;
  std::string out;
  std::string format = "table";
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_model = true) {
  if (with_model) {
    cmd->add_option("--model", args.model, "built-in model name or JSON file path");
    cmd->add_option("--set", args.overrides, "model field override key=value (repeatable)");
  }
  cmd->add_option("--seed", args.seed, "random seed");
  cmd->add_option("--samples", args.samples, "Monte Carlo sample budget");
  cmd->add_option("--jobs", args.jobs, "worker cap (0 = auto)");
  cmd->add_option("--out", args.out, "write the report to this path");
  cmd->add_option("--format", args.format, "table|json|csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));
}

McOptions mc_options(const CommonArgs& args) {
  McOptions o;
  o.samples = args.samples;
  o.seed = args.seed;
  o.jobs = args.jobs;
  return o;
}

taskinfo::models::ScalarModel scalar_model(const CommonArgs& args) {
  auto any = taskinfo::config::load_model(args.model, args.overrides);
  if (auto* m = std::get_if<taskinfo::models::ScalarModel>(&any)) return *m;
  throw std::invalid_argument("command needs a scalar model, got a vector model");
}

taskinfo::models::VectorModel vector_model(const CommonArgs& args) {
  auto any = taskinfo::config::load_model(args.model, args.overrides);
  if (auto* m = std::get_if<taskinfo::models::VectorModel>(&any)) return *m;
  throw std::invalid_argument("command needs a vector model, got a scalar model");
}

void emit(const CommonArgs& args, const json& record, const std::string& table_line,
          const std::string& csv = "") {
  std::string payload;
  if (args.format == "json") {
    payload = record.dump(2) + "\n";
  } else if (args.format == "csv" && !csv.empty()) {
    payload = csv;
  } else {
    payload = table_line + "\n";
  }
  std::fputs(payload.c_str(), stdout);
  if (!args.out.empty()) {
    std::ofstream f(args.out);
    if (!f) throw std::runtime_error("cannot write output file: " + args.out);
    // Files get the full-precision JSON unless CSV was requested.
    f << (args.format == "csv" && !csv.empty() ? csv : record.dump(2) + "\n");
  }
}

std::string sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

int verdict_exit(Verdict v) {
  if (v == Verdict::kViolated) return 4;
  if (v == Verdict::kInconclusive) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information measures for parameter estimation and change detection"};
  app.require_subcommand(1);

  CommonArgs args;
  double theta = 0.0, theta0 = 0.0, theta1 = 1.0;
  std::vector<double> theta_vec{0.0, 0.0};
  std::vector<double> steps;
  std::vector<double> direction{1.0, 0.0};
  std::string route = "prior";
  std::string estimator_name = "posterior_mean";
  std::string side_name = "plus";
  std::string method = "auto";
  std::string roc_out;
  bool analytic = false;

  auto* fi = app.add_subcommand("fi", "conditional Fisher information at theta");
  add_common(fi, args);
  fi->add_option("--theta", theta);
  fi->add_option("--method", method)->check(CLI::IsMember({"auto", "analytic", "mc"}));

  auto* fim = app.add_subcommand("fim", "conditional Fisher information matrix");
  add_common(fim, args);
  fim->add_option("--theta", theta_vec, "parameter vector");
  fim->add_option("--method", method)->check(CLI::IsMember({"auto", "analytic", "mc"}));

  auto* bayes_fi = app.add_subcommand("bayes-fi", "Bayesian Fisher information");
  add_common(bayes_fi, args);
  bayes_fi->add_option("--route", route)
      ->check(CLI::IsMember({"prior", "posterior", "tprime", "all"}));

  auto* auc = app.add_subcommand("auc", "ideal-observer ROC and AUC");
  add_common(auc, args);
  auc->add_option("--theta0", theta0);
  auc->add_option("--theta1", theta1);
  auc->add_flag("--analytic", analytic, "closed-form AUC instead of sampling");
  auc->add_option("--roc-out", roc_out, "write the ROC curve CSV here");

  auto* mpe = app.add_subcommand("mpe", "minimum probability of error");
  add_common(mpe, args);
  mpe->add_option("--theta0", theta0);
  mpe->add_option("--theta1", theta1);
  mpe->add_flag("--analytic", analytic, "closed-form MPE (Gaussian models)");

  auto* mpe_slope = app.add_subcommand("mpe-slope", "one-sided slope of the averaged MPE");
  add_common(mpe_slope, args);
  mpe_slope->add_option("--side", side_name)->check(CLI::IsMember({"plus", "minus"}));
  mpe_slope->add_option("--steps", steps, "step ladder in posterior-sd units");

  auto* tv_cmd = app.add_subcommand("tv", "total variation of the model's posterior");
  add_common(tv_cmd, args);
  tv_cmd->add_option("--method", method)
      ->check(CLI::IsMember({"auto", "analytic", "unimodal", "grid"}));

  auto* tv_avg = app.add_subcommand("tv-average", "data-averaged posterior TV, both routes");
  add_common(tv_avg, args);

  auto* zz = app.add_subcommand("zz-bound", "error-integral lower bound vs estimator EMSE");
  add_common(zz, args);
  zz->add_option("--estimator", estimator_name)
      ->check(CLI::IsMember({"posterior_mean", "ml_linear", "constant"}));

  auto* vantrees = app.add_subcommand("vantrees", "information lower bound vs estimator EMSE");
  add_common(vantrees, args);
  vantrees->add_option("--estimator", estimator_name)
      ->check(CLI::IsMember({"posterior_mean", "ml_linear", "constant"}));

  auto* schwarz = app.add_subcommand("schwarz", "MPE slope against (1/4) sqrt(F)");
  add_common(schwarz, args);
  schwarz->add_option("--side", side_name)->check(CLI::IsMember({"plus", "minus"}));

  auto* repro = app.add_subcommand("reproduce-paper",
                                   "run every closed-form constant and property check");
  add_common(repro, args, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fi->parsed()) {
      auto model = scalar_model(args);
      auto m = method == "analytic" ? taskinfo::fisher::Method::kAnalytic
               : method == "mc"     ? taskinfo::fisher::Method::kMonteCarlo
                                    : taskinfo::fisher::Method::kAuto;
      auto r = taskinfo::fisher::fisher_information(model, theta, mc_options(args), m);
      emit(args, taskinfo::report::to_json(r, "fisher_information"),
           "F(" + sig6(theta) + ") = " + sig6(r.value) + " [" + r.method + "]");
      return 0;
    }
    if (fim->parsed()) {
      auto model = vector_model(args);
      Eigen::VectorXd th(static_cast<Eigen::Index>(theta_vec.size()));
      for (std::size_t i = 0; i < theta_vec.size(); ++i) th[static_cast<Eigen::Index>(i)] = theta_vec[i];
      auto m = method == "analytic" ? taskinfo::fisher::Method::kAnalytic
               : method == "mc"     ? taskinfo::fisher::Method::kMonteCarlo
                                    : taskinfo::fisher::Method::kAuto;
      auto r = taskinfo::fisher::fisher_matrix(model, th, mc_options(args), m);
      emit(args, taskinfo::report::to_json(r, "fisher_matrix"),
           "trace FIM = " + sig6(r.value) + " [" + r.method + "]");
      return 0;
    }
    if (bayes_fi->parsed()) {
      auto model = scalar_model(args);
      McOptions o = mc_options(args);
      json out = json::array();
      std::string line;
      auto run_route = [&](const std::string& name) {
        taskinfo::fisher::FisherResult r;
        if (name == "prior") {
          r = taskinfo::fisher::bayesian_fi_prior_form(model, o.derived(1));
        } else if (name == "posterior") {
          r = taskinfo::fisher::bayesian_fi_posterior_form(model, o.derived(2));
        } else {
          r = taskinfo::fisher::bayesian_fi_var_tprime(model, o.derived(3));
        }
        out.push_back(taskinfo::report::to_json(r, "bayes_fi_" + name));
        line += name + ": F = " + sig6(r.value);
        if (r.std_error) line += " +- " + sig6(*r.std_error);
        line += "\n";
      };
      if (route == "all") {
        run_route("prior");
        run_route("posterior");
        run_route("tprime");
      } else {
        run_route(route);
      }
      if (!line.empty()) line.pop_back();
      emit(args, out.size() == 1 ? out[0] : out, line);
      return 0;
    }
    if (auc->parsed()) {
      auto model = scalar_model(args);
      if (analytic) {
        double a = taskinfo::observer::auc_analytic(model, theta0, theta1);
        json j{{"quantity", "auc"}, {"method", "analytic"}, {"value", a}};
        emit(args, j, "AUC = " + sig6(a) + " [analytic]");
        return 0;
      }
      auto curve = taskinfo::observer::roc_and_auc(model, theta0, theta1, mc_options(args));
      if (!roc_out.empty()) {
        std::ofstream f(roc_out);
        if (!f) throw std::runtime_error("cannot write output file: " + roc_out);
        f << taskinfo::report::roc_csv(curve);
      }
      emit(args, taskinfo::report::to_json(curve),
           "AUC = " + sig6(curve.auc) + " +- " + sig6(curve.std_error) +
               (curve.degenerate ? " (degenerate)" : ""),
           taskinfo::report::roc_csv(curve));
      return 0;
    }
    if (mpe->parsed()) {
      auto model = scalar_model(args);
      auto est = analytic
                     ? taskinfo::observer::mpe_analytic_gaussian(model, theta0, theta1)
                     : taskinfo::observer::mpe(model, theta0, theta1, mc_options(args));
      emit(args, taskinfo::report::to_json(est),
           "P_e = " + sig6(est.value) + " +- " + sig6(est.std_error));
      return 0;
    }
    if (mpe_slope->parsed()) {
      auto model = scalar_model(args);
      auto side = side_name == "plus" ? taskinfo::bounds::Side::kPlus
                                      : taskinfo::bounds::Side::kMinus;
      auto est = taskinfo::bounds::mpe_slope(model, side, steps, mc_options(args));
      emit(args, taskinfo::report::to_json(est),
           "slope(" + side_name + ") = " + sig6(est.extrapolated) + " +- " +
               sig6(est.std_error));
      return 0;
    }
    if (tv_cmd->parsed()) {
      auto model = scalar_model(args);
      // Posterior at the model's prior-mean data point; independent of g
      // for every shipped closed-form model.
      Eigen::VectorXd g = Eigen::VectorXd::Zero(model.data_dim);
      taskinfo::tv::TvEstimate est;
      if (method == "grid") {
        auto post = taskinfo::models::posterior_density_grid(model, g);
        est = taskinfo::tv::tv_grid(post);
      } else {
        auto post = taskinfo::models::posterior_density(model, g);
        if (method == "unimodal") {
          est = taskinfo::tv::tv_unimodal(post);
        } else if (std::holds_alternative<taskinfo::models::GridDensity>(post.family)) {
          est = taskinfo::tv::tv_grid(post);
        } else {
          est = taskinfo::tv::tv_analytic(post);
        }
      }
      emit(args, taskinfo::report::to_json(est, "posterior_tv"),
           "TV = " + sig6(est.value) + " [" + est.method + "]",
           taskinfo::report::refinement_csv(est));
      return 0;
    }
    if (tv_avg->parsed()) {
      auto model = scalar_model(args);
      auto avg = taskinfo::tv::tv_average(model, mc_options(args));
      json j{{"posterior_route", taskinfo::report::to_json(avg.posterior_route, "tv_average")},
             {"score_route", taskinfo::report::to_json(avg.score_route, "mean_abs_tprime")}};
      emit(args, j,
           "avg TV = " + sig6(avg.posterior_route.value) + " [" +
               avg.posterior_route.method + "], <<|t'|>> = " + sig6(avg.score_route.value) +
               " +- " + sig6(avg.score_route.std_error.value_or(0.0)));
      return 0;
    }
    if (zz->parsed() || vantrees->parsed()) {
      auto model = scalar_model(args);
      auto kind = estimator_name == "ml_linear" ? taskinfo::bounds::EstimatorKind::kMlLinear
                  : estimator_name == "constant"
                      ? taskinfo::bounds::EstimatorKind::kConstant
                      : taskinfo::bounds::EstimatorKind::kPosteriorMean;
      auto est = taskinfo::bounds::make_estimator(model, kind, model.prior_mean);
      auto r = zz->parsed()
                   ? taskinfo::bounds::ziv_zakai_check(model, est, mc_options(args))
                   : taskinfo::bounds::van_trees_check(model, est, mc_options(args));
      emit(args, taskinfo::report::to_json(r), taskinfo::report::bound_line(r));
      return verdict_exit(r.verdict);
    }
    if (schwarz->parsed()) {
      auto model = scalar_model(args);
      auto side = side_name == "plus" ? taskinfo::bounds::Side::kPlus
                                      : taskinfo::bounds::Side::kMinus;
      auto r = taskinfo::bounds::schwarz_bound_check(model, mc_options(args), side);
      emit(args, taskinfo::report::to_json(r), taskinfo::report::bound_line(r));
      return verdict_exit(r.verdict);
    }
    if (repro->parsed()) {
      auto rep = taskinfo::suite::run_suite(args.seed, args.samples, args.jobs);
      std::string md = rep.markdown();
      if (args.format == "json") {
        std::fputs((rep.to_json(false).dump(2) + "\n").c_str(), stdout);
      } else {
        std::fputs(md.c_str(), stdout);
        std::fprintf(stdout, "wall clock: %.2fs\n", rep.wall_clock_s);
      }
      if (!args.out.empty()) {
        std::ofstream f(args.out);
        if (!f) throw std::runtime_error("cannot write output file: " + args.out);
        f << rep.to_json(false).dump(2) << "\n";
      }
      return rep.exit_code();
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 2;
}
