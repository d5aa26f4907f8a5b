#include "opcorrect/cli/pipeline.hpp"

#include "opcorrect/bayes/bounds.hpp"
#include "opcorrect/bayes/chain_io.hpp"
#include "opcorrect/bayes/posterior.hpp"
#include "opcorrect/bayes/truth.hpp"
#include "opcorrect/cli/config.hpp"
#include "opcorrect/cli/manifest.hpp"
#include "opcorrect/cli/render.hpp"
#include "opcorrect/common/parallel.hpp"
#include "opcorrect/costing/ledger.hpp"
#include "opcorrect/surrogate/accuracy.hpp"
#include "opcorrect/surrogate/workflow.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>

namespace opcorrect::cli {

namespace fs = std::filesystem;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

Json counters_json(const bayes::EvalCounters& c) {
  return Json{{"potential_evals", c.potential_evals}, {"forward_solves", c.forward_solves},
              {"newton_iters", c.newton_iters},       {"correction_solves", c.correction_solves},
              {"surrogate_evals", c.surrogate_evals}, {"failures", c.failures},
              {"model_seconds", c.model_seconds},     {"surrogate_seconds", c.surrogate_seconds},
              {"correction_seconds", c.correction_seconds}};
}

bayes::EvalCounters counters_from_json(const Json& j) {
  bayes::EvalCounters c;
  c.potential_evals = j.at("potential_evals").get<long>();
  c.forward_solves = j.at("forward_solves").get<long>();
  c.newton_iters = j.at("newton_iters").get<long>();
  c.correction_solves = j.at("correction_solves").get<long>();
  c.surrogate_evals = j.at("surrogate_evals").get<long>();
  c.failures = j.at("failures").get<long>();
  c.model_seconds = j.at("model_seconds").get<double>();
  c.surrogate_seconds = j.at("surrogate_seconds").get<double>();
  c.correction_seconds = j.at("correction_seconds").get<double>();
  return c;
}

std::string chain_file(const std::string& map, int c) { return "chain_" + map + "_" + std::to_string(c) + ".chain"; }

class Pipeline {
public:
  Pipeline(RunConfig cfg, bool force)
      : cfg_(std::move(cfg)), dir_(cfg_.output_dir), force_(force), hash_(cfg_.hash()),
        mesh_(fem::build_unit_square_mesh(cfg_.mesh.nx, cfg_.mesh.ny)), model_(mesh_),
        prior_(mesh_, cfg_.prior.alpha, cfg_.prior.beta, Vector::Constant(mesh_.n_nodes(), cfg_.prior.mean),
               cfg_.prior.gamma_override) {
    fs::create_directories(dir_);
    std::ofstream(dir_ / "config.resolved") << cfg_.resolved_text();
  }

  void gen_truth() {
    if (skip("gen-truth")) return;
    Manifest m = begin("gen-truth");
    const Vector truth = bayes::rosenbrock_truth(mesh_);
    fem::write_fefield(dir_ / "truth.fefield", nx(), ny(), {truth, fem::FieldRole::parameter});
    render_field(truth, nx(), ny(), dir_ / "truth.pgm");
    m.results["formula"] = bayes::truth_formula();
    finish(m, {}, {"truth.fefield", "truth.pgm"});
  }

  void gen_data() {
    if (skip("gen-data")) return;
    need("truth.fefield", "gen-truth");
    Manifest m = begin("gen-data");
    const Vector truth = read_field("truth.fefield");
    bayes::ObservationSetup obs = bayes::build_observation_adjusting(mesh_, model_.space().lumped_mass(),
                                                                      cfg_.observation.grid, cfg_.observation.radius);
    RngStream rng(cfg_.observation.seed, 0);
    const bayes::SyntheticData d = bayes::make_synthetic_data(obs, model_, truth, cfg_.observation.noise_pct, rng);
    write_observed_data(dir_ / "data.obs", {d.y_star, d.clean, d.sigma, obs.radius});
    m.seeds["observation"] = cfg_.observation.seed;
    m.counters["newton_iters"] = d.newton_iters;
    m.results["sigma"] = d.sigma;
    m.results["radius"] = obs.radius;
    m.results["requested_radius"] = obs.requested_radius;
    m.results["n_y"] = obs.n_y();
    finish(m, {"truth.fefield"}, {"data.obs"});
  }

  void gen_training() {
    if (skip("gen-training")) return;
    Manifest m = begin("gen-training");
    const auto t0 = clock_type::now();
    long newton_train = 0, newton_test = 0;
    sample_pairs(cfg_.surrogate.n_train, 1, "train", newton_train);
    const double train_seconds = seconds_since(t0);
    sample_pairs(cfg_.surrogate.n_test, 2, "test", newton_test);
    m.seeds["surrogate"] = cfg_.surrogate.seed;
    m.counters["newton_train"] = newton_train;
    m.counters["newton_test"] = newton_test;
    m.counters["train_seconds"] = train_seconds;
    finish(m, {}, {"train_params.samples", "train_states.samples", "test_params.samples", "test_states.samples"});
  }

  void compute_bases() {
    if (skip("compute-bases")) return;
    need("train_params.samples", "gen-training");
    need("train_states.samples", "gen-training");
    Manifest m = begin("compute-bases");
    const auto ms = read_samples(dir_ / "train_params.samples");
    const auto us = read_samples(dir_ / "train_states.samples");
    surrogate::BasisOptions bo;
    bo.r_in = cfg_.surrogate.r_in;
    bo.r_out = cfg_.surrogate.r_out;
    bo.oversample = cfg_.surrogate.oversample;
    bo.n_basis_samples = std::min<int>(cfg_.surrogate.n_basis_samples, static_cast<int>(ms.size()));
    bo.jobs = cfg_.jobs;
    RngStream rng(cfg_.surrogate.seed, 3);
    surrogate::BasisBuild build = surrogate::build_reduced_basis(model_, prior_.mean(), ms, us, bo, rng);
    surrogate::NeuralOperator op;
    op.nx = nx();
    op.ny = ny();
    op.basis = std::move(build.basis);
    op.net = surrogate::ResNet(bo.r_in, bo.r_out, cfg_.surrogate.layer_rank);
    surrogate::write_dipnet(dir_ / "basis.dipnet", op);
    m.seeds["surrogate"] = cfg_.surrogate.seed;
    m.counters["linear_solves"] = build.linear_solves;
    m.counters["n_basis_samples"] = bo.n_basis_samples;
    finish(m, {"train_params.samples", "train_states.samples"}, {"basis.dipnet"});
  }

  void train() {
    if (skip("train")) return;
    need("basis.dipnet", "compute-bases");
    Manifest m = begin("train");
    surrogate::NeuralOperator op = load_operator("basis.dipnet");
    const auto ms = read_samples(dir_ / "train_params.samples");
    const auto us = read_samples(dir_ / "train_states.samples");
    surrogate::TrainingOptions o;
    o.initial_layers = cfg_.surrogate.initial_layers;
    o.max_layers = cfg_.surrogate.layers;
    o.layer_rank = cfg_.surrogate.layer_rank;
    o.epochs = cfg_.surrogate.epochs_per_stage;
    o.final_epochs = cfg_.surrogate.final_epochs;
    o.batch_size = cfg_.surrogate.batch;
    o.learning_rate = cfg_.surrogate.lr;
    o.seed = cfg_.surrogate.seed;
    const surrogate::TrainingResult r = surrogate::train_adaptive(surrogate::make_training_set(op.basis, ms, us), o);
    op.net = r.net;
    surrogate::write_dipnet(dir_ / "surrogate.dipnet", op);
    std::ofstream log(dir_ / "training_log.csv");
    surrogate::write_training_log(log, r.log);
    log.close();
    m.seeds["surrogate"] = cfg_.surrogate.seed;
    m.results["best_heldout_mse"] = r.best_heldout_mse;
    m.results["n_layers"] = r.net.n_layers();
    m.results["n_heldout"] = r.n_heldout;
    finish(m, {"basis.dipnet", "train_params.samples", "train_states.samples"},
           {"surrogate.dipnet", "training_log.csv"});
  }

  void eval_accuracy() {
    if (skip("eval-accuracy")) return;
    need("surrogate.dipnet", "train");
    need("test_params.samples", "gen-training");
    need("test_states.samples", "gen-training");
    Manifest m = begin("eval-accuracy");
    const surrogate::NeuralOperator op = load_operator("surrogate.dipnet");
    const auto ms = read_samples(dir_ / "test_params.samples");
    const auto us = read_samples(dir_ / "test_states.samples");
    const auto norm = surrogate::parse_norm(cfg_.surrogate.norm);
    std::vector<Vector> raw(ms.size()), corrected(ms.size());
    parallel_for(ms.size(), cfg_.jobs, [&](std::size_t i, std::size_t) {
      raw[i] = op.predict(ms[i]);
      corrected[i] = model_.error_correct(raw[i], ms[i]).u.values;
    });
    const auto a_raw = surrogate::relative_accuracy(us, raw, model_.mass(), model_.stiffness(), norm);
    const auto a_cor = surrogate::relative_accuracy(us, corrected, model_.mass(), model_.stiffness(), norm);
    std::vector<double> ratios;
    for (std::size_t i = 0; i < std::min<std::size_t>(20, ms.size()); ++i) {
      const double before = (raw[i] - us[i]).cwiseAbs().maxCoeff();
      const double after = (corrected[i] - us[i]).cwiseAbs().maxCoeff();
      if (before > 0.0) ratios.push_back(after / before);
    }
    std::sort(ratios.begin(), ratios.end());
    std::ofstream out(dir_ / "accuracy.csv");
    out << std::setprecision(10) << "map,norm,accuracy\n"
        << "no," << cfg_.surrogate.norm << ',' << a_raw.accuracy << '\n'
        << "ecno," << cfg_.surrogate.norm << ',' << a_cor.accuracy << '\n';
    out.close();
    m.results["accuracy_no"] = a_raw.accuracy;
    m.results["accuracy_ecno"] = a_cor.accuracy;
    if (!ratios.empty()) m.results["median_max_error_ratio"] = ratios[ratios.size() / 2];
    m.counters["correction_solves"] = static_cast<long>(ms.size());
    finish(m, {"surrogate.dipnet", "test_params.samples", "test_states.samples"}, {"accuracy.csv"});
  }

  void mcmc(const std::string& map_name) {
    const bayes::StateMap map = bayes::parse_state_map(map_name);
    const std::string stage = "mcmc-" + bayes::to_string(map);
    if (skip(stage)) return;
    need("data.obs", "gen-data");
    std::vector<std::string> inputs{"data.obs"};
    std::unique_ptr<surrogate::NeuralOperator> op;
    if (map != bayes::StateMap::model) {
      need("surrogate.dipnet", "train");
      op = std::make_unique<surrogate::NeuralOperator>(load_operator("surrogate.dipnet"));
      inputs.push_back("surrogate.dipnet");
    }
    Manifest m = begin(stage);
    const auto [obs, data] = load_observation();
    const bayes::Potential potential(model_, obs, data.y_star, map, op.get());
    bayes::PcnOptions po;
    po.beta = cfg_.mcmc.beta_pcn;
    po.n_steps = cfg_.mcmc.n_steps;
    po.thin = cfg_.mcmc.thin;
    const auto chains = bayes::run_chains([&](int) { return potential.function(); }, prior_, po,
                                          cfg_.mcmc.n_chains, cfg_.mcmc.seed, prior_.mean(), cfg_.jobs);
    std::vector<std::string> outputs;
    Json acceptance = Json::array();
    for (int c = 0; c < cfg_.mcmc.n_chains; ++c) {
      const std::string name = chain_file(bayes::to_string(map), c);
      bayes::write_chain(dir_ / name, nx(), ny(), chains[static_cast<std::size_t>(c)]);
      outputs.push_back(name);
      acceptance.push_back(chains[static_cast<std::size_t>(c)].acceptance_rate());
    }
    const std::string metrics = "metrics_" + bayes::to_string(map) + ".csv";
    std::ofstream csv(dir_ / metrics);
    bayes::write_chain_metrics(csv, chains);
    csv.close();
    outputs.push_back(metrics);

    const bayes::EvalCounters total = bayes::merge_counters(chains);
    m.seeds["mcmc"] = cfg_.mcmc.seed;
    m.counters = counters_json(total);
    m.counters["n_chain"] = static_cast<long>(cfg_.mcmc.n_chains) * cfg_.mcmc.n_steps;
    m.results["acceptance"] = acceptance;
    if (total.potential_evals > 0)
      m.results["mean_newton"] =
          static_cast<double>(total.newton_iters) / static_cast<double>(total.potential_evals);
    finish(m, inputs, outputs);
  }

  void posterior_mean() {
    if (skip("posterior-mean")) return;
    Manifest m = begin("posterior-mean");
    const bayes::Transform transform = bayes::parse_transform(cfg_.mcmc.transform);
    std::vector<std::string> inputs, outputs;
    std::map<std::string, Vector> means;
    for (const std::string map : {"model", "no", "ecno"}) {
      if (!fs::exists(dir_ / chain_file(map, 0))) continue;
      std::vector<bayes::ChainRecord> chains;
      for (int c = 0; c < cfg_.mcmc.n_chains; ++c) {
        const std::string name = chain_file(map, c);
        need(name, "mcmc --map " + map);
        chains.push_back(bayes::read_chain(dir_ / name));
        inputs.push_back(name);
      }
      const Vector mean = bayes::posterior_mean(chains, cfg_.mcmc.burn_in_frac, transform);
      const std::string stem = "posterior_mean_" + map;
      fem::write_fefield(dir_ / (stem + ".fefield"), nx(), ny(), {mean, fem::FieldRole::parameter});
      render_field(mean, nx(), ny(), dir_ / (stem + ".pgm"));
      outputs.push_back(stem + ".fefield");
      outputs.push_back(stem + ".pgm");
      means[map] = mean;
    }
    if (means.empty()) throw Error("missing chain files: run `mcmc` first");
    if (means.count("model")) {
      const Vector& ref = means["model"];
      const double scale = std::sqrt(model_.mass().quadratic_form(ref));
      for (const auto& [map, mean] : means)
        if (map != "model")
          m.results["relative_l2_to_model_" + map] = std::sqrt(model_.mass().quadratic_form(mean - ref)) / scale;
    }
    m.results["transform"] = cfg_.mcmc.transform;
    finish(m, inputs, outputs);
  }

  void report(const std::string& kind) {
    if (kind == "speedup") report_speedup();
    else if (kind == "bound") report_bound();
    else throw InvalidArgument("unknown report '" + kind + "' (expected speedup or bound)");
  }

  void render() {
    if (skip("render")) return;
    Manifest m = begin("render");
    std::vector<std::string> inputs, outputs;
    std::vector<fs::path> fields;
    for (const auto& e : fs::directory_iterator(dir_))
      if (e.path().extension() == ".fefield") fields.push_back(e.path());
    std::sort(fields.begin(), fields.end());
    if (fields.empty()) throw Error("no .fefield artifacts to render: run `gen-truth` first");
    for (const auto& p : fields) {
      const fem::FieldRecord rec = fem::read_fefield(p);
      const std::string out = p.stem().string() + ".pgm";
      const Raster r = render_field(rec.field.values, rec.nx, rec.ny, dir_ / out);
      inputs.push_back(p.filename().string());
      outputs.push_back(out);
      m.results[out] = Json{{"min", r.min}, {"max", r.max}, {"degenerate", r.degenerate}};
    }
    finish(m, inputs, outputs);
  }

private:
  int nx() const { return cfg_.mesh.nx; }
  int ny() const { return cfg_.mesh.ny; }

  bool skip(const std::string& stage) const {
    if (force_ || !up_to_date(dir_, stage, hash_)) return false;
    std::cout << stage << ": up to date\n";
    return true;
  }

  Manifest begin(const std::string& stage) {
    started_ = clock_type::now();
    Manifest m;
    m.stage = stage;
    m.config_hash = hash_;
    return m;
  }

  void finish(Manifest& m, const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
    m.seconds = seconds_since(started_);
    m.inputs = hash_files(dir_, inputs);
    m.outputs = hash_files(dir_, outputs);
    write_manifest(dir_, m);
    std::cout << m.stage << ": wrote";
    for (const auto& o : outputs) std::cout << ' ' << o;
    std::cout << '\n';
  }

  void need(const std::string& name, const std::string& producer) const {
    if (!fs::exists(dir_ / name)) throw Error("missing " + name + ": run `" + producer + "` first");
  }

  Manifest need_manifest(const std::string& stage, const std::string& producer) const {
    auto m = read_manifest(dir_, stage);
    if (!m) throw Error("missing " + stage + ".json: run `" + producer + "` first");
    return *m;
  }

  Vector read_field(const std::string& name) const {
    const fem::FieldRecord rec = fem::read_fefield(dir_ / name);
    if (rec.nx != nx() || rec.ny != ny()) throw Error(name + " was written for a different mesh");
    return rec.field.values;
  }

  surrogate::NeuralOperator load_operator(const std::string& name) const {
    surrogate::NeuralOperator op = surrogate::read_dipnet(dir_ / name);
    if (op.nx != nx() || op.ny != ny()) throw Error(name + " was written for a different mesh");
    op.basis.bind(model_.mass());
    return op;
  }

  std::pair<bayes::ObservationSetup, ObservedData> load_observation() const {
    ObservedData d = read_observed_data(dir_ / "data.obs");
    bayes::ObservationSetup obs =
        bayes::build_observation(mesh_, model_.space().lumped_mass(), cfg_.observation.grid, d.radius);
    if (obs.n_y() != d.y_star.size()) throw Error("data.obs does not match observation.grid");
    obs.sigma = d.sigma;
    return {std::move(obs), std::move(d)};
  }

  void sample_pairs(int n, std::uint64_t stream, const std::string& prefix, long& newton) {
    RngStream rng(cfg_.surrogate.seed, stream);
    std::vector<Vector> ms, us(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ms.push_back(prior_.sample(rng).values);
    std::vector<int> iters(static_cast<std::size_t>(n));
    parallel_for(ms.size(), cfg_.jobs, [&](std::size_t i, std::size_t) {
      const model::ForwardSolution s = model_.solve_forward(ms[i]);
      us[i] = s.u.values;
      iters[i] = s.newton_iters;
    });
    for (int it : iters) newton += it;
    write_samples(dir_ / (prefix + "_params.samples"), ms, "parameter");
    write_samples(dir_ / (prefix + "_states.samples"), us, "state");
  }

  void report_speedup() {
    if (skip("report-speedup")) return;
    need("surrogate.dipnet", "train");
    for (const std::string stage : {"gen-training", "compute-bases", "train"}) need_manifest(stage, stage);
    for (const std::string map : {"model", "no", "ecno"}) need_manifest("mcmc-" + map, "mcmc --map " + map);
    Manifest m = begin("report-speedup");

    const surrogate::NeuralOperator op = load_operator("surrogate.dipnet");
    const costing::CostCalibration cal = costing::calibrate_costs(model_, op, prior_.mean(), 100);
    auto ledger = [&](const std::string& map) { return load_ledger(dir_, map); };
    const costing::CostLedger model_ledger = ledger("model");
    std::vector<costing::SpeedupRow> rows;
    for (const auto mode : {costing::SpeedupMode::no, costing::SpeedupMode::ecno}) {
      const std::string map = costing::to_string(mode);
      rows.push_back(costing::speedup_row(model_ledger, ledger(map), mode, cfg_.surrogate.n_train, cal));
    }
    std::ofstream csv(dir_ / "speedup.csv");
    costing::write_speedup_csv(csv, rows);
    csv.close();
    m.results["cost_no_units"] = cal.cost_no_units();
    m.results["linear_solve_seconds"] = cal.linear_solve_seconds;
    m.results["mean_newton"] = costing::mean_newton_iterations(model_ledger);
    finish(m, {"surrogate.dipnet", "mcmc-model.json", "mcmc-no.json", "mcmc-ecno.json"}, {"speedup.csv"});
  }

  void report_bound() {
    if (skip("report-bound")) return;
    need("data.obs", "gen-data");
    need("surrogate.dipnet", "train");
    Manifest m = begin("report-bound");
    auto [obs, data] = load_observation();
    obs.sigma *= cfg_.bound.sigma_scale;
    const surrogate::NeuralOperator op = load_operator("surrogate.dipnet");
    const bayes::StateFn model_map = [&](const Vector& x) { return model_.solve_forward(x).u.values; };
    const bayes::StateFn no_map = [&](const Vector& x) { return op.predict(x); };
    const bayes::StateFn ecno_map = [&](const Vector& x) { return model_.error_correct(op.predict(x), x).u.values; };

    std::ofstream csv(dir_ / "bound.csv");
    csv << std::setprecision(10)
        << "map,n_mc,c1,c2_1,c2_q,c3,c_L,c_B,c_B_tilde,E_norm,c_BIP,bound_value,kl_estimate,kl_se,ess\n";
    for (const auto& [name, fn] : {std::pair{std::string("no"), no_map}, std::pair{std::string("ecno"), ecno_map}}) {
      RngStream rng(cfg_.bound.seed, 0);
      const bayes::BoundConstants b = bayes::estimate_bound_constants(obs, data.y_star, model_map, fn, prior_,
                                                                      model_.mass(), cfg_.bound.n_mc, rng, cfg_.jobs);
      csv << name << ',' << b.n_mc << ',' << b.c1 << ',' << b.c2_1 << ',' << b.c2_q << ',' << b.c3 << ','
          << b.c_L << ',' << b.c_B << ',' << b.c_B_tilde << ',' << b.E_norm << ',' << b.c_BIP << ','
          << b.bound_value << ',' << b.kl_estimate << ',' << b.kl.standard_error << ',' << b.kl.ess << '\n';
      m.results[name] = Json{{"bound_value", b.bound_value}, {"kl_estimate", b.kl_estimate},
                             {"kl_reliable", b.kl.reliable}, {"skipped_L", b.skipped_L}};
    }
    csv.close();
    m.seeds["bound"] = cfg_.bound.seed;
    finish(m, {"data.obs", "surrogate.dipnet"}, {"bound.csv"});
  }

  RunConfig cfg_;
  fs::path dir_;
  bool force_;
  std::string hash_;
  fem::Mesh mesh_;
  model::ReactionDiffusion model_;
  prior::BiLaplacianPrior prior_;
  clock_type::time_point started_;
};

} // namespace

costing::CostLedger load_ledger(const fs::path& dir, const std::string& map) {
  auto get = [&](const std::string& stage) {
    auto m = read_manifest(dir, stage);
    if (!m) throw Error("missing " + stage + ".json in " + dir.string());
    return *m;
  };
  const Manifest run = get("mcmc-" + bayes::to_string(bayes::parse_state_map(map)));
  costing::CostLedger l;
  l.label = map;
  l.n_chain = run.counters.at("n_chain").get<long>();
  l.online = counters_from_json(run.counters);
  if (map != "model") {
    const Manifest gen = get("gen-training");
    const Manifest bases = get("compute-bases");
    l.offline_newton_iters = gen.counters.at("newton_train").get<long>();
    l.offline_derivative_solves = bases.counters.at("linear_solves").get<long>();
    l.offline_seconds = gen.counters.at("train_seconds").get<double>() + bases.seconds;
    l.training_seconds = get("train").seconds;
  }
  return l;
}

int run_command(int argc, const char* const* argv) {
  CLI::App app{"Error-corrected neural operator pipeline for a nonlinear reaction-diffusion inverse problem",
               "opcorrect"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", version_string());

  std::string config_path;
  bool force = false;
  int jobs = 0;
  std::string map, report_kind;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "Run configuration (flat key = value file)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_flag("--force", force, "Re-run even if the stage's artifacts are up to date");
    sub->add_option("-j,--jobs", jobs, "Worker threads (overrides run.jobs)")->check(CLI::PositiveNumber);
    return sub;
  };
  add_common(app.add_subcommand("gen-truth", "Write the truth parameter field"));
  add_common(app.add_subcommand("gen-data", "Synthesize noisy observations of the truth"));
  add_common(app.add_subcommand("gen-training", "Sample prior parameters and solve for training and test states"));
  add_common(app.add_subcommand("compute-bases", "Build the derivative-informed input and POD output bases"));
  add_common(app.add_subcommand("train", "Train the reduced-basis network"));
  add_common(app.add_subcommand("eval-accuracy", "Raw and corrected generalization accuracy on the test set"));
  auto* mcmc = add_common(app.add_subcommand("mcmc", "Run pCN chains with the chosen state map"));
  mcmc->add_option("--map", map, "State map for the likelihood")
      ->required()
      ->check(CLI::IsMember({"model", "no", "ecno"}));
  add_common(app.add_subcommand("posterior-mean", "Posterior predictive means from the stored chains"));
  auto* report = add_common(app.add_subcommand("report", "Cost or error-bound report"));
  report->add_option("kind", report_kind, "speedup or bound")->required()->check(CLI::IsMember({"speedup", "bound"}));
  add_common(app.add_subcommand("render", "Render every stored field to PGM"));
  app.footer("Environment: OPCORRECT_SEED overrides every seed in the configuration.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunConfig cfg = load_config(config_path);
    apply_seed_environment(cfg);
    if (jobs > 0) cfg.jobs = jobs;
    cfg.validate();
    Pipeline p(std::move(cfg), force);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "gen-truth") p.gen_truth();
    else if (cmd == "gen-data") p.gen_data();
    else if (cmd == "gen-training") p.gen_training();
    else if (cmd == "compute-bases") p.compute_bases();
    else if (cmd == "train") p.train();
    else if (cmd == "eval-accuracy") p.eval_accuracy();
    else if (cmd == "mcmc") p.mcmc(map);
    else if (cmd == "posterior-mean") p.posterior_mean();
    else if (cmd == "report") p.report(report_kind);
    else if (cmd == "render") p.render();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_command(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_command(static_cast<int>(argv.size()), argv.data());
}

} // namespace opcorrect::cli
