// Command-line front end: load, ask, project, prob, learn, gen-world, eval.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tempora/eval.hpp"
#include "tempora/learner.hpp"
#include "tempora/loader.hpp"
#include "tempora/projector.hpp"
#include "tempora/worldgen.hpp"

namespace {

using namespace tempora;

struct CommonPaths {
    std::string kb, events, hazards;
};

void add_world_options(CLI::App* cmd, CommonPaths& paths, bool kb_required = true) {
    auto* kb = cmd->add_option("--kb", paths.kb, "kb file (s-expressions)");
    if (kb_required) kb->required();
    cmd->add_option("--events", paths.events, "event file");
    cmd->add_option("--hazards", paths.hazards, "hazard file");
}

World load_world(const CommonPaths& paths) {
    World w;
    if (!paths.kb.empty()) load_kb_file(w, paths.kb);
    if (!paths.events.empty()) load_events_file(w, paths.events);
    if (!paths.hazards.empty()) load_hazards_file(w, paths.hazards);
    return w;
}

int require_alpha_in_range(double alpha) {
    if (alpha > 0.0 && alpha < 1.0) return 0;
    std::cerr << "usage error: --alpha must lie strictly between 0 and 1\n";
    return 1;
}

void print_resolution_warning(const World& world, const Fluent& f) {
    const auto resolved = resolve_hazard(f, world.hazards, world.kb);
    if (resolved && !resolved->warning.empty())
        std::cerr << "warning: " << resolved->warning << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tempora: temporal projection over event timelines and hazard curves"};
    app.require_subcommand(1);

    CommonPaths load_paths;
    auto* cmd_load = app.add_subcommand("load", "parse and validate world files");
    add_world_options(cmd_load, load_paths);

    CommonPaths ask_paths;
    std::string ask_fluent, ask_at = "1970-01-01", ask_mode = "m2";
    double ask_alpha = 0.5;
    auto* cmd_ask = app.add_subcommand("ask", "answer a truth query");
    cmd_ask->add_option("fluent", ask_fluent, "query fluent, e.g. \"(isa Fred Married)\"")
        ->required();
    cmd_ask->add_option("--at", ask_at, "time form: date, year, or (interval a b)")->required();
    cmd_ask->add_option("--mode", ask_mode, "m1 (lookup) or m2 (with projection)");
    cmd_ask->add_option("--alpha", ask_alpha, "likelihood threshold");
    add_world_options(cmd_ask, ask_paths);

    CommonPaths project_paths;
    std::string project_fluent, project_at;
    double project_alpha = 0.5;
    bool project_trace = false;
    auto* cmd_project = app.add_subcommand("project", "print the projected interval");
    cmd_project->add_option("fluent", project_fluent, "fluent to project")->required();
    cmd_project->add_option("--at", project_at, "query time form")->required();
    cmd_project->add_option("--alpha", project_alpha, "likelihood threshold");
    cmd_project->add_flag("--trace", project_trace, "print the step-by-step decisions");
    add_world_options(cmd_project, project_paths);

    CommonPaths prob_paths;
    std::string prob_fluent, prob_at;
    auto* cmd_prob = app.add_subcommand("prob", "persistence likelihood at a day");
    cmd_prob->add_option("fluent", prob_fluent, "fluent")->required();
    cmd_prob->add_option("--at", prob_at, "date (YYYY-MM-DD)")->required();
    add_world_options(cmd_prob, prob_paths);

    std::string learn_episodes, learn_for, learn_out, learn_period = "365";
    std::vector<std::string> learn_cov;
    std::int64_t learn_periods = 20;
    std::int64_t learn_max_iterations = 500;
    bool learn_force = false, learn_no_pool = false;
    auto* cmd_learn = app.add_subcommand("learn", "fit a hazard spec from episodes");
    cmd_learn->add_option("--episodes", learn_episodes, "episode csv")->required();
    cmd_learn->add_option("--for", learn_for, "target pattern, e.g. \"(isa ?x Cricketer)\"")
        ->required();
    cmd_learn->add_option("--period", learn_period, "period length (days or e.g. 1year)");
    cmd_learn->add_option("--periods", learn_periods, "number of modeled periods");
    cmd_learn->add_option("--cov", learn_cov, "covariate pattern per fitted coefficient");
    cmd_learn->add_option("--max-iterations", learn_max_iterations, "ascent iteration cap");
    cmd_learn->add_flag("--force", learn_force, "export even if the fit did not converge");
    cmd_learn->add_flag("--no-pool", learn_no_pool, "keep event-free periods unpooled");
    cmd_learn->add_option("--out", learn_out, "hazard spec output file");

    std::string gen_out;
    WorldConfig gen_cfg;
    auto* cmd_gen = app.add_subcommand("gen-world", "generate a synthetic benchmark world");
    cmd_gen->add_option("--out", gen_out, "output directory")->required();
    cmd_gen->add_option("--seed", gen_cfg.seed, "rng seed");
    cmd_gen->add_option("--individuals", gen_cfg.n_individuals, "number of individuals");
    cmd_gen->add_option("--density", gen_cfg.observation_density,
                        "fraction of each true span exposed");
    cmd_gen->add_option("--event-density", gen_cfg.event_density, "event emission probability");
    cmd_gen->add_option("--queries-per-set", gen_cfg.queries_per_set, "queries per themed set");
    cmd_gen->add_option("--entry-age", gen_cfg.career_entry_age, "career entry age (years)");
    cmd_gen->add_option("--retirement-age", gen_cfg.retirement_age,
                        "career survival checkpoint age");

    CommonPaths eval_paths;
    std::string eval_queries, eval_answers, eval_out;
    double eval_alpha = 0.5;
    int eval_threads = 1;
    auto* cmd_eval = app.add_subcommand("eval", "score query sets in both modes");
    add_world_options(cmd_eval, eval_paths);
    cmd_eval->add_option("--queries", eval_queries, "query file")->required();
    cmd_eval->add_option("--answers", eval_answers, "answer key csv")->required();
    cmd_eval->add_option("--out", eval_out, "report directory")->required();
    cmd_eval->add_option("--alpha", eval_alpha, "default likelihood threshold");
    cmd_eval->add_option("--threads", eval_threads, "evaluation worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_load->parsed()) {
            const World w = load_world(load_paths);
            std::printf("kb: %zu assertions\n", w.kb.assertions().size());
            std::printf("events: %zu\n", w.events.events().size());
            std::printf("hazards: %zu specs, %zu fixed-duration rules\n", w.hazards.specs.size(),
                        w.hazards.fixed_rules.size());
        } else if (cmd_ask->parsed()) {
            if (int rc = require_alpha_in_range(ask_alpha)) return rc;
            const World w = load_world(ask_paths);
            const Fluent f = Fluent::parse_text(ask_fluent);
            const TimeInterval at = parse_time_form_text(ask_at);
            const Mode mode = parse_mode(ask_mode);
            const Verdict v = answer(w, f, at, mode, ask_alpha);
            print_resolution_warning(w, f);
            std::string detail;
            if (mode == Mode::M2) {
                try {
                    const ProjectionResult pr = temporally_project(w, f, at, ask_alpha);
                    if (pr.interval)
                        detail = " " + pr.interval->to_string() + " source=" +
                                 to_string(pr.source);
                } catch (const Error&) {
                }
            }
            std::printf("%s%s\n", to_string(v), detail.c_str());
        } else if (cmd_project->parsed()) {
            if (int rc = require_alpha_in_range(project_alpha)) return rc;
            const World w = load_world(project_paths);
            const Fluent f = Fluent::parse_text(project_fluent);
            const TimeInterval at = parse_time_form_text(project_at);
            std::vector<std::string> trace;
            const ProjectionResult pr =
                temporally_project(w, f, at, project_alpha, project_trace ? &trace : nullptr);
            print_resolution_warning(w, f);
            for (const std::string& line : trace) std::printf("# %s\n", line.c_str());
            std::printf("interval=%s source=%s truncated=%s\n",
                        pr.interval ? pr.interval->to_string().c_str() : "none",
                        to_string(pr.source), pr.truncated ? "yes" : "no");
        } else if (cmd_prob->parsed()) {
            const World w = load_world(prob_paths);
            const double p =
                prob_holds(w, Fluent::parse_text(prob_fluent), TimePoint::parse(prob_at));
            std::printf("%.6f\n", p);
        } else if (cmd_learn->parsed()) {
            const auto episodes = parse_episodes_text(detail::read_file(learn_episodes),
                                                      learn_episodes);
            const std::int64_t period_days = parse_duration_days(learn_period);
            const auto records = build_person_period(episodes, period_days);
            FitConfig config;
            config.max_iterations = learn_max_iterations;
            config.pool_sparse = !learn_no_pool;
            const FitResult result = fit(records, learn_periods, config);
            std::fputs(format_fit_report(result).c_str(), stdout);
            if (!learn_out.empty()) {
                std::vector<FluentPattern> cov_patterns;
                for (const std::string& c : learn_cov)
                    cov_patterns.push_back(FluentPattern::parse_text(c));
                const HazardSpec spec =
                    export_spec(result, FluentPattern::parse_text(learn_for), period_days,
                                cov_patterns, learn_force);
                write_text_file(learn_out, to_file_form(spec) + "\n");
                std::printf("wrote %s\n", learn_out.c_str());
            }
        } else if (cmd_gen->parsed()) {
            const GeneratedWorld g = generate(gen_cfg);
            std::filesystem::create_directories(gen_out);
            const auto path = [&](const char* name) { return gen_out + "/" + name; };
            write_text_file(path("kb.sexp"), g.kb_text);
            write_text_file(path("events.sexp"), g.events_text);
            write_text_file(path("hazards.sexp"), g.hazards_text);
            write_text_file(path("queries.sexp"), g.queries_text);
            write_text_file(path("answers.csv"), g.answers_csv);
            write_text_file(path("truth.csv"), g.truth_csv);
            std::printf("wrote world (seed %llu, %d individuals) to %s\n",
                        static_cast<unsigned long long>(gen_cfg.seed), gen_cfg.n_individuals,
                        gen_out.c_str());
        } else if (cmd_eval->parsed()) {
            if (int rc = require_alpha_in_range(eval_alpha)) return rc;
            const World w = load_world(eval_paths);
            const auto queries = parse_queries_file(eval_queries);
            const auto key = parse_answers_csv(detail::read_file(eval_answers), eval_answers);
            const EvalReport report = run_eval(w, queries, key, eval_alpha, eval_threads);
            std::filesystem::create_directories(eval_out);
            write_text_file(eval_out + "/report.csv", render_report_csv(report));
            write_text_file(eval_out + "/verdicts.csv", render_verdicts_csv(report));
            write_text_file(eval_out + "/curves.csv", render_curves_csv(w.hazards));
            std::fputs(render_report_csv(report).c_str(), stdout);
            if (report.invalid > 0)
                std::printf("invalid queries excluded: %d\n", report.invalid);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
