#pragma once

// Batch command-line front end: calibrate, evaluate, simulate, oracle,
// discrepancy, generate, report. Exit codes: 0 success, 1 domain/validation
// error, 2 usage error.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "synthcal/dataio.hpp"
#include "synthcal/evaluation.hpp"
#include "synthcal/llm_gen.hpp"
#include "synthcal/llm_gen_http.hpp"
#include "synthcal/simulator.hpp"

namespace synthcal::cli {

namespace detail {

struct StatOptions {
    double alpha = 0.05;
    double gamma = 0.5;
    double dilation = 2.0;
    std::size_t budget = 0;  // 0: use the shortest synthetic list
    std::string method = "general";
    std::string constructor_name = "bernstein";
    std::string range_spec;  // "lo,hi" override
    unsigned threads = 1;
};

inline void add_stat_options(CLI::App* cmd, StatOptions& opt) {
    cmd->add_option("--alpha", opt.alpha, "Target miscoverage level");
    cmd->add_option("--gamma", opt.gamma, "Real-data confidence level (general method)");
    cmd->add_option("--dilation", opt.dilation, "Dilation factor C (>= 1)");
    cmd->add_option("--budget", opt.budget,
                    "Simulation budget K (default: shortest synthetic list)");
    cmd->add_option("--method", opt.method, "Selection method: simple|general");
    cmd->add_option("--constructor", opt.constructor_name,
                    "Set constructor: clt|bernstein|kl|box");
    cmd->add_option("--range", opt.range_spec,
                    "Response range override as lo,hi (default: from dataset)");
    cmd->add_option("--threads", opt.threads, "Worker thread limit");
}

inline ResponseRange parse_range(const std::string& spec) {
    std::size_t comma = spec.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("--range expects lo,hi, got '" + spec + "'");
    ResponseRange r{std::stod(spec.substr(0, comma)), std::stod(spec.substr(comma + 1))};
    r.validate();
    return r;
}

inline CalibrationConfig build_config(const StatOptions& opt, const Dataset& ds,
                                      std::span<const CalibrationRecord> records) {
    CalibrationConfig cfg;
    cfg.alpha = opt.alpha;
    cfg.gamma = opt.gamma;
    cfg.dilation = opt.dilation;
    cfg.method = method_from_string(opt.method);
    cfg.constructor = constructor_from_string(opt.constructor_name);
    cfg.range = opt.range_spec.empty() ? ds.range : parse_range(opt.range_spec);
    if (opt.budget > 0) {
        cfg.budget = opt.budget;
    } else {
        std::size_t shortest = std::numeric_limits<std::size_t>::max();
        for (const CalibrationRecord& rec : records)
            shortest = std::min(shortest, rec.synthetic_responses.size());
        cfg.budget = shortest;
    }
    cfg.validate();
    validate_budget(records, cfg.budget);
    return cfg;
}

inline ordered_json config_echo(const StatOptions& opt, const CalibrationConfig& cfg,
                                const std::string& data_path) {
    ordered_json c;
    c["data"] = data_path;
    c["alpha"] = cfg.alpha;
    c["gamma"] = cfg.gamma;
    c["dilation"] = cfg.dilation;
    c["budget"] = cfg.budget;
    c["method"] = to_string(cfg.method);
    c["constructor"] = to_string(cfg.constructor);
    c["range"] = {cfg.range.lo, cfg.range.hi};
    (void)opt;
    return c;
}

inline ordered_json base_meta(const std::string& command) {
    ordered_json meta;
    meta["tool"] = "synthcal";
    meta["tool_version"] = kToolVersion;
    meta["command"] = command;
    return meta;
}

struct PresetOptions {
    std::string preset = "beta-logistic";
    double beta_a = 2.0;
    double beta_b = 2.0;
    double f_lo = 0.2;
    double f_hi = 0.8;
    double mu = 0.5;
    double mu_syn = 0.5;
    double p_low = 0.05;
    std::size_t buckets = 200;
    double shift = 0.0;
};

inline void add_preset_options(CLI::App* cmd, PresetOptions& opt) {
    cmd->add_option("--preset", opt.preset,
                    "Population preset: beta-logistic|two-point|uniform|constant|binary-skill");
    cmd->add_option("--beta-a", opt.beta_a, "Beta shape a (beta-logistic)");
    cmd->add_option("--beta-b", opt.beta_b, "Beta shape b (beta-logistic)");
    cmd->add_option("--f-lo", opt.f_lo, "Low performance level (two-point)");
    cmd->add_option("--f-hi", opt.f_hi, "High performance level (two-point)");
    cmd->add_option("--mu", opt.mu, "Real mean (constant)");
    cmd->add_option("--mu-syn", opt.mu_syn, "Synthetic mean (constant)");
    cmd->add_option("--p-low", opt.p_low, "Low success probability (binary-skill)");
    cmd->add_option("--buckets", opt.buckets, "Question buckets (binary-skill)");
    cmd->add_option("--shift", opt.shift, "Constant synthetic mean shift");
}

inline PopulationModel build_preset(const PresetOptions& opt) {
    PopulationModel pop;
    if (opt.preset == "beta-logistic")
        pop = presets::beta_logistic(opt.beta_a, opt.beta_b);
    else if (opt.preset == "two-point")
        pop = presets::two_point(opt.f_lo, opt.f_hi);
    else if (opt.preset == "uniform")
        pop = presets::uniform_identity();
    else if (opt.preset == "constant")
        pop = presets::constant_means(opt.mu, opt.mu_syn);
    else if (opt.preset == "binary-skill")
        pop = presets::binary_skill(opt.p_low, opt.buckets);
    else
        throw std::invalid_argument("unknown preset '" + opt.preset + "'");
    if (opt.shift != 0.0) pop = presets::with_shift(std::move(pop), opt.shift);
    return pop;
}

inline ordered_json preset_echo(const PresetOptions& opt) {
    ordered_json c;
    c["preset"] = opt.preset;
    if (opt.preset == "beta-logistic") {
        c["beta_a"] = opt.beta_a;
        c["beta_b"] = opt.beta_b;
    } else if (opt.preset == "two-point") {
        c["f_lo"] = opt.f_lo;
        c["f_hi"] = opt.f_hi;
    } else if (opt.preset == "constant") {
        c["mu"] = opt.mu;
        c["mu_syn"] = opt.mu_syn;
    } else if (opt.preset == "binary-skill") {
        c["p_low"] = opt.p_low;
        c["buckets"] = opt.buckets;
    }
    if (opt.shift != 0.0) c["shift"] = opt.shift;
    return c;
}

inline void print_aggregate_table(std::ostream& os, const ResultsFile& results) {
    for (const ordered_json& row : results.rows) {
        if (row.value("type", "") != "aggregate") continue;
        os << "  " << row.value("field", "?") << ": mean ";
        os << row.at("mean").dump() << " +- " << row.at("ci95_halfwidth").dump()
           << " (1.96 x stderr, n=" << row.value("n", 0) << ")\n";
    }
}

}  // namespace detail

inline int run_calibrate(const std::string& data_path, const detail::StatOptions& opt,
                         bool alpha_grid, const std::string& out_path) {
    Dataset ds = load_dataset_file(data_path);
    std::vector<CalibrationRecord> records = ds.records();
    CalibrationConfig cfg = detail::build_config(opt, ds, records);

    std::vector<double> alphas{cfg.alpha};
    if (alpha_grid) alphas = {0.05, 0.1, 0.15, 0.2};

    ResultsFile results;
    results.meta = detail::base_meta("calibrate");
    results.meta["config"] = detail::config_echo(opt, cfg, data_path);
    if (alpha_grid) results.meta["config"]["alpha_grid"] = alphas;

    for (double alpha : alphas) {
        CalibrationConfig acfg = cfg;
        acfg.alpha = alpha;
        CalibrationResult res = calibrate(records, acfg, opt.threads);
        ordered_json tag;
        if (alpha_grid) tag["alpha"] = alpha;
        for (auto& row : rows::from_calibration(res, tag)) results.rows.push_back(row);
        std::cout << "alpha=" << alpha << "  k_hat=" << res.k_hat
                  << "  kappa_hat=" << res.kappa_hat << "  threshold=" << res.threshold
                  << "\n";
        if (res.k_hat == 0)
            std::cerr << "warning: k_hat = 0 at alpha=" << alpha
                      << " -- the synthetic source is unusable at this level\n";
    }
    write_results(results, out_path);
    std::cout << "results written to " << out_path << "\n";
    return 0;
}

inline int run_evaluate(const std::string& data_path, const detail::StatOptions& opt,
                        const SplitPlan& plan, const std::string& out_path) {
    Dataset ds = load_dataset_file(data_path);
    std::vector<CalibrationRecord> records = ds.records();
    CalibrationConfig cfg = detail::build_config(opt, ds, records);
    EvaluationReport report = run_splits(records, cfg, plan, opt.threads);

    ResultsFile results;
    results.meta = detail::base_meta("evaluate");
    results.meta["config"] = detail::config_echo(opt, cfg, data_path);
    results.meta["config"]["splits"] = plan.n_splits;
    results.meta["config"]["train_frac"] = plan.train_fraction;
    results.meta["seed"] = plan.seed;
    for (auto& row : rows::from_evaluation(report)) results.rows.push_back(row);
    write_results(results, out_path);

    std::cout << "evaluated " << plan.n_splits << " splits\n";
    detail::print_aggregate_table(std::cout, results);
    std::cout << "results written to " << out_path << "\n";
    return 0;
}

inline int run_simulate(const detail::PresetOptions& popt, std::size_t kappa, std::size_t m,
                        std::size_t n, std::size_t budget, std::uint64_t seed,
                        const std::string& out_path) {
    PopulationModel pop = detail::build_preset(popt);
    MTurkModel pool;
    const MTurkModel* pool_ptr = nullptr;
    if (kappa > 0) {
        RngStream pool_rng(seed, 0xA6E27);
        pool = draw_mturk(pop, kappa, pool_rng);
        pool_ptr = &pool;
    }
    auto records = make_calibration_records(pop, pool_ptr, m, n, budget, seed);

    Dataset ds;
    ds.range = ResponseRange{0.0, 1.0};
    for (auto& rec : records) {
        DatasetQuestion q;
        q.record = std::move(rec);
        ds.questions.push_back(std::move(q));
    }
    ordered_json j = dataset_to_json(ds);
    ordered_json prov;
    prov["tool"] = "synthcal";
    prov["tool_version"] = kToolVersion;
    prov["command"] = "simulate";
    prov["population"] = detail::preset_echo(popt);
    prov["kappa"] = kappa;
    prov["m"] = m;
    prov["n"] = n;
    prov["budget"] = budget;
    prov["seed"] = seed;
    j["provenance"] = std::move(prov);
    write_json_file(j, out_path);
    std::cout << "simulated " << m << " questions (" << pop.name << ", kappa="
              << (kappa > 0 ? std::to_string(kappa) : std::string("aligned")) << ") -> "
              << out_path << "\n";
    return 0;
}

inline int run_oracle(const detail::PresetOptions& popt, std::size_t kappa, double dilation,
                      const std::string& constructor_name, double alpha, std::size_t k_max,
                      std::size_t n_questions, std::size_t n_reps, std::size_t resamples,
                      double question, std::size_t vr_reps, std::uint64_t seed,
                      unsigned threads, const std::string& out_path) {
    PopulationModel pop = detail::build_preset(popt);
    MTurkModel pool;
    const MTurkModel* pool_ptr = nullptr;
    if (kappa > 0) {
        RngStream pool_rng(seed, 0xA6E27);
        pool = draw_mturk(pop, kappa, pool_rng);
        pool_ptr = &pool;
    }

    ResultsFile results;
    results.meta = detail::base_meta("oracle");
    results.meta["config"] = detail::preset_echo(popt);
    results.meta["config"]["kappa"] = kappa;
    results.meta["config"]["dilation"] = dilation;
    results.meta["config"]["constructor"] = constructor_name;
    results.meta["config"]["alpha"] = alpha;
    results.meta["config"]["k_max"] = k_max;
    results.meta["config"]["mc"] = {{"n_questions", n_questions}, {"n_reps", n_reps}};
    results.meta["seed"] = seed;

    OracleResult oracle =
        oracle_k_star(pop, pool_ptr, dilation, constructor_from_string(constructor_name), alpha,
                      OracleMc{n_questions, n_reps}, k_max, seed, threads);
    results.rows.push_back(rows::from_oracle(oracle));
    for (std::size_t k = 1; k <= k_max; ++k)
        results.rows.push_back(rows::curve_row(k, "coverage", oracle.coverage[k]));
    std::cout << "k_star=" << oracle.k_star << (oracle.censored ? " (censored)" : "")
              << "  coverage=" << oracle.coverage_at_k_star << " +- " << oracle.std_error
              << "\n";

    if (resamples > 0) {
        VarianceRatioResult vr =
            variance_ratio_check(pop, question, kappa, resamples, vr_reps, seed + 1, threads);
        ordered_json row;
        row["type"] = "variance_ratio";
        row["B"] = resamples;
        row["empirical_ratio"] = vr.empirical_ratio;
        row["predicted_ratio"] = vr.predicted_ratio;
        row["tau_sq"] = vr.tau_sq;
        row["sigma_sq"] = vr.sigma_sq;
        results.rows.push_back(std::move(row));
        results.meta["config"]["resamples"] = resamples;
        std::cout << "variance ratio: empirical=" << vr.empirical_ratio
                  << " predicted=" << vr.predicted_ratio << "\n";
    }
    write_results(results, out_path);
    std::cout << "results written to " << out_path << "\n";
    return 0;
}

inline int run_discrepancy(const detail::PresetOptions& popt, std::size_t kappa, std::size_t m,
                           double alpha, std::uint64_t seed, const std::string& out_path) {
    PopulationModel pop = detail::build_preset(popt);
    MTurkModel pool;
    const MTurkModel* pool_ptr = nullptr;
    if (kappa > 0) {
        RngStream pool_rng(seed, 0xA6E27);
        pool = draw_mturk(pop, kappa, pool_rng);
        pool_ptr = &pool;
    }
    RngStream q_rng(seed, 1);
    std::vector<double> questions(m);
    for (auto& psi : questions) psi = pop.sample_question(q_rng);
    std::vector<double> levels{0.5, 0.9, 0.95, 1.0 - alpha};
    DiscrepancyReport report = discrepancies(pop, pool_ptr, questions, levels);

    ResultsFile results;
    results.meta = detail::base_meta("discrepancy");
    results.meta["config"] = detail::preset_echo(popt);
    results.meta["config"]["kappa"] = kappa;
    results.meta["config"]["m"] = m;
    results.meta["config"]["alpha"] = alpha;
    results.meta["seed"] = seed;
    for (auto& row : rows::from_discrepancy(report)) results.rows.push_back(row);
    write_results(results, out_path);

    std::cout << "discrepancies over " << m << " questions (" << report.degenerate_count
              << " degenerate)\n";
    for (const auto& [level, value] : report.chi2_quantiles)
        std::cout << "  chi2 Q_" << level << " = " << value << "\n";
    for (const auto& [level, value] : report.kl_quantiles)
        std::cout << "  kl   Q_" << level << " = " << value << "\n";
    std::cout << "results written to " << out_path << "\n";
    return 0;
}

inline int run_generate(const std::string& data_path, const GenConfig& gen_cfg,
                        const std::string& template_path, const std::string& profiles_path,
                        std::size_t k_new, std::uint64_t seed, const std::string& out_path) {
    PromptTemplate tmpl =
        template_path.empty() ? default_prompt_template() : load_template(template_path);
    auto pool = load_profiles(profiles_path);
    auto transport = make_transport(gen_cfg);

    std::string target = out_path.empty() ? data_path : out_path;
    GenReport report;
    if (target == data_path) {
        report = generate_into_file(data_path, tmpl, pool, k_new, gen_cfg, seed, *transport);
    } else {
        Dataset ds = load_dataset_file(data_path);
        report = generate_responses(ds, tmpl, pool, k_new, gen_cfg, seed, *transport);
        write_dataset(ds, target);
    }

    std::ofstream prov(target + ".provenance.jsonl");
    for (const auto& row : report.provenance) prov << row.dump() << "\n";

    std::size_t short_count = 0;
    for (const auto& q : report.per_question) {
        if (q.short_flag) {
            ++short_count;
            std::cerr << "warning: question '" << q.question_id << "' is short (" << q.added
                      << "/" << q.requested << " responses)\n";
        }
    }
    std::cout << "appended responses for " << report.per_question.size() << " questions ("
              << short_count << " short) -> " << target << "\n";
    return 0;
}

inline int run_report(const std::string& in_path, const std::string& csv_path) {
    ResultsFile results = read_results(in_path);
    std::cout << "== " << results.meta.value("command", "?") << " results ("
              << in_path << ") ==\n";
    std::cout << "meta: " << results.meta.dump() << "\n";
    std::size_t curve_rows = 0;
    for (const ordered_json& row : results.rows) {
        std::string type = row.value("type", "?");
        if (type == "curve") {
            ++curve_rows;
            continue;
        }
        std::cout << "  [" << type << "]";
        for (auto it = row.begin(); it != row.end(); ++it) {
            if (it.key() == "type") continue;
            std::cout << " " << it.key() << "=" << it.value().dump();
        }
        std::cout << "\n";
    }
    if (curve_rows > 0) std::cout << "  [curve] " << curve_rows << " rows\n";
    detail::print_aggregate_table(std::cout, results);
    if (!csv_path.empty()) {
        write_csv(results, csv_path);
        std::cout << "csv written to " << csv_path << "\n";
    }
    return 0;
}

// Entry point shared by the binary and the tests.
inline int run(int argc, const char* const* argv) {
    CLI::App app{"Calibrated confidence sets from synthetic survey responses"};
    app.require_subcommand(1);

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Select the simulation sample size k_hat");
    detail::StatOptions cal_opt;
    std::string cal_data, cal_out = "results.json";
    bool cal_grid = false;
    cal->add_option("--data", cal_data, "Dataset file")->required();
    cal->add_option("--out", cal_out, "Results file");
    detail::add_stat_options(cal, cal_opt);
    cal->add_flag("--alpha-grid", cal_grid, "Run the alpha menu {0.05, 0.1, 0.15, 0.2}");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Train/test evaluation over repeated splits");
    detail::StatOptions ev_opt;
    std::string ev_data, ev_out = "results.json";
    SplitPlan plan;
    ev->add_option("--data", ev_data, "Dataset file")->required();
    ev->add_option("--out", ev_out, "Results file");
    detail::add_stat_options(ev, ev_opt);
    ev->add_option("--splits", plan.n_splits, "Number of train/test splits");
    ev->add_option("--train-frac", plan.train_fraction, "Train fraction (default 0.6)");
    ev->add_option("--seed", plan.seed, "Split seed");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a dataset from a population preset");
    detail::PresetOptions sim_popt;
    std::size_t sim_kappa = 0, sim_m = 100, sim_n = 400, sim_budget = 200;
    std::uint64_t sim_seed = 0;
    std::string sim_out = "dataset.json";
    detail::add_preset_options(sim, sim_popt);
    sim->add_option("--kappa", sim_kappa, "Hidden agent pool size (0 = aligned)");
    sim->add_option("--m", sim_m, "Number of questions");
    sim->add_option("--n", sim_n, "Real responses per question");
    sim->add_option("--budget", sim_budget, "Synthetic responses per question (K)");
    sim->add_option("--seed", sim_seed, "Master seed");
    sim->add_option("--out", sim_out, "Dataset output file");

    // oracle
    auto* ora = app.add_subcommand("oracle", "Monte Carlo oracle sample size k*(C)");
    detail::PresetOptions ora_popt;
    std::size_t ora_kappa = 0, ora_kmax = 1000, ora_q = 2000, ora_reps = 1;
    std::size_t ora_resamples = 0, ora_vr_reps = 20000;
    double ora_dilation = 2.0, ora_alpha = 0.1, ora_question = 0.5;
    std::string ora_ctor = "clt";
    std::uint64_t ora_seed = 0;
    unsigned ora_threads = 1;
    std::string ora_out = "results.json";
    detail::add_preset_options(ora, ora_popt);
    ora->add_option("--kappa", ora_kappa, "Hidden agent pool size (0 = aligned)");
    ora->add_option("--dilation", ora_dilation, "Dilation factor C");
    ora->add_option("--constructor", ora_ctor, "Interval constructor: clt|kl");
    ora->add_option("--alpha", ora_alpha, "Target miscoverage level");
    ora->add_option("--k-max", ora_kmax, "Largest sample size scanned");
    ora->add_option("--m", ora_q, "Monte Carlo questions");
    ora->add_option("--mc-reps", ora_reps, "Synthetic replicates per question");
    ora->add_option("--resamples", ora_resamples,
                    "Also run the variance-ratio check with B resamples per agent");
    ora->add_option("--question", ora_question, "Question parameter for the variance check");
    ora->add_option("--vr-reps", ora_vr_reps, "Variance-check replicates");
    ora->add_option("--seed", ora_seed, "Master seed");
    ora->add_option("--threads", ora_threads, "Worker thread limit");
    ora->add_option("--out", ora_out, "Results file");

    // discrepancy
    auto* dis = app.add_subcommand("discrepancy", "Per-question discrepancies and quantiles");
    detail::PresetOptions dis_popt;
    std::size_t dis_kappa = 0, dis_m = 1000;
    double dis_alpha = 0.1;
    std::uint64_t dis_seed = 0;
    std::string dis_out = "results.json";
    detail::add_preset_options(dis, dis_popt);
    dis->add_option("--kappa", dis_kappa, "Hidden agent pool size (0 = aligned)");
    dis->add_option("--m", dis_m, "Number of questions");
    dis->add_option("--alpha", dis_alpha, "Quantile level parameter");
    dis->add_option("--seed", dis_seed, "Master seed");
    dis->add_option("--out", dis_out, "Results file");

    // generate
    auto* gen = app.add_subcommand("generate", "Append LLM-simulated responses to a dataset");
    GenConfig gen_cfg;
    std::string gen_data, gen_template, gen_profiles, gen_out;
    std::size_t gen_k = 1;
    std::uint64_t gen_seed = 0;
    gen->add_option("--data", gen_data, "Dataset file")->required();
    gen->add_option("--endpoint", gen_cfg.endpoint,
                    "Chat endpoint (http://host:port/v1 or mock:<completion>)")
        ->required();
    gen->add_option("--model", gen_cfg.model, "Model name");
    gen->add_option("--template", gen_template, "Prompt template file (JSON)");
    gen->add_option("--profiles", gen_profiles, "Profile pool file (JSON array)")->required();
    gen->add_option("--k", gen_k, "Responses to generate per question");
    gen->add_option("--temperature", gen_cfg.temperature, "Sampling temperature");
    gen->add_option("--max-retries", gen_cfg.max_retries, "Retries per response");
    gen->add_option("--timeout", gen_cfg.timeout_sec, "Request timeout in seconds");
    gen->add_option("--parallel", gen_cfg.parallel, "In-flight request limit");
    gen->add_option("--seed", gen_seed, "Profile sampling seed");
    gen->add_option("--out", gen_out, "Write the updated dataset here instead of in place");

    // report
    auto* rep = app.add_subcommand("report", "Render a results file without recomputation");
    std::string rep_in, rep_csv;
    rep->add_option("--in", rep_in, "Results file")->required();
    rep->add_option("--csv", rep_csv, "Also export curve/aggregate rows as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (cal->parsed()) return run_calibrate(cal_data, cal_opt, cal_grid, cal_out);
        if (ev->parsed()) return run_evaluate(ev_data, ev_opt, plan, ev_out);
        if (sim->parsed())
            return run_simulate(sim_popt, sim_kappa, sim_m, sim_n, sim_budget, sim_seed,
                                sim_out);
        if (ora->parsed())
            return run_oracle(ora_popt, ora_kappa, ora_dilation, ora_ctor, ora_alpha, ora_kmax,
                              ora_q, ora_reps, ora_resamples, ora_question, ora_vr_reps,
                              ora_seed, ora_threads, ora_out);
        if (dis->parsed())
            return run_discrepancy(dis_popt, dis_kappa, dis_m, dis_alpha, dis_seed, dis_out);
        if (gen->parsed())
            return run_generate(gen_data, gen_cfg, gen_template, gen_profiles, gen_k, gen_seed,
                                gen_out);
        if (rep->parsed()) return run_report(rep_in, rep_csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "no subcommand given\n" << app.help();
    return 2;
}

}  // namespace synthcal::cli
