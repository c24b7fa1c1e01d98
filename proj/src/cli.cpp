#include "tracelens/cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "httplib.h"
#include "tracelens/complexity.hpp"
#include "tracelens/graph.hpp"
#include "tracelens/render.hpp"
#include "tracelens/server.hpp"
#include "tracelens/statistics.hpp"
#include "tracelens/study.hpp"
#include "tracelens/trace.hpp"

namespace tracelens::cli {

namespace fs = std::filesystem;

std::vector<RuleCombo> parse_chain(const std::string& text) {
  if (text == "default") return default_chain();
  if (text == "nofr") return nofr_chain();
  std::vector<RuleCombo> chain;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) chain.push_back(RuleCombo::parse(item));
  if (chain.empty()) throw InvalidCombo("empty chain");
  return chain;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& content, const std::string& out_path,
          std::ostream& out) {
  if (out_path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("cannot write " + out_path);
  file << content;
  if (!file) throw Error("write to " + out_path + " failed");
}

TemplateSet templates_from_env() {
  const char* path = std::getenv("TRACELENS_TEMPLATES");
  if (path == nullptr || *path == '\0') return {};
  return TemplateSet::load(path);
}

int serve(const ServiceConfig& config, int port, std::ostream& err) {
  ExplorerService service(config);
  httplib::Server server;
  service.mount(server);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });

  err << "serving on port " << port << std::endl;
  const bool ok = server.listen("0.0.0.0", port);
  if (!ok) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  if (!ok) {
    err << "error: cannot listen on port " << port << std::endl;
    return kExitDomainError;
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Layered explanations of logical proof traces"};
  app.require_subcommand(1);

  std::string trace_path, out_path, chain = "default", left, right;
  std::string scenarios_dir, pages_path, ratings_path, export_dir;
  std::size_t participants = 0;
  std::uint64_t seed = 0;
  double alpha = study::kDefaultAlpha;
  int port = 8080;
  bool as_text = false, as_json = false;

  auto* validate = app.add_subcommand("validate", "Check a trace document");
  validate->add_option("--trace", trace_path, "Trace JSON")->required();

  auto* explain = app.add_subcommand("explain", "Render a layered explanation");
  explain->add_option("--trace", trace_path, "Trace JSON")->required();
  explain->add_option("--chain", chain, "default | nofr | none,FL,FL-FR,...");
  auto* text_flag = explain->add_flag("--text", as_text, "Plain-text output");
  explain->add_flag("--json", as_json, "JSON output (default)")->excludes(text_flag);
  explain->add_option("--out", out_path, "Output path");

  auto* compare = app.add_subcommand("compare", "Compare two layers by abstraction");
  compare->add_option("--trace", trace_path, "Trace JSON")->required();
  compare->add_option("--left", left, "Rule combination")->required();
  compare->add_option("--right", right, "Rule combination")->required();

  auto* pages = app.add_subcommand("pages", "Build the study pages");
  pages->add_option("--scenarios", scenarios_dir, "Directory of trace files")->required();
  pages->add_option("--out", out_path, "Output path");

  auto* assign = app.add_subcommand("assign", "Assign pages to participants");
  assign->add_option("--pages", pages_path, "Pages JSON")->required();
  assign->add_option("--participants", participants, "Participant count")
      ->required()
      ->check(CLI::PositiveNumber);
  assign->add_option("--seed", seed, "Random seed")->required();
  assign->add_option("--out", out_path, "Output path");

  auto* analyze = app.add_subcommand("analyze", "Friedman analysis of ratings");
  analyze->add_option("--ratings", ratings_path, "Ratings CSV")->required();
  analyze->add_option("--pages", pages_path, "Pages JSON")->required();
  analyze->add_option("--alpha", alpha, "Significance level")
      ->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--out", out_path, "Output path");

  auto* serve_cmd = app.add_subcommand("serve", "Serve explanations and collect ratings");
  serve_cmd->add_option("--export", export_dir, "Directory of explanation exports")
      ->required();
  serve_cmd->add_option("--ratings", ratings_path, "Ratings CSV")->required();
  serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--pages", pages_path, "Pages JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (msg.empty()) msg = e.get_name();
    err << "usage error: " << msg << std::endl;
    return kExitUsage;
  }

  try {
    if (*validate) {
      try {
        ProofTrace trace = load_trace(trace_path);
        out << "ok: " << trace.statements.size() << " statements, "
            << trace.rules.size() << " rule applications\n";
        return kExitOk;
      } catch (const InvalidTrace& e) {
        for (const auto& v : e.report().violations) {
          out << v.invariant << " " << v.id << ": " << v.message << "\n";
        }
        err << "error: trace has " << e.report().violations.size()
            << " violation(s)" << std::endl;
        return kExitDomainError;
      }
    }

    if (*explain) {
      const ExplanationGraph g = build_graph(load_trace(trace_path));
      const LayeredExplanation le = generate_layers(g, parse_chain(chain));
      const TemplateSet templates = templates_from_env();
      emit(as_text ? export_text(le, templates) : export_layers(le, templates),
           out_path, out);
      return kExitOk;
    }

    if (*compare) {
      const ExplanationGraph g = build_graph(load_trace(trace_path));
      const RuleCombo lc = RuleCombo::parse(left);
      const RuleCombo rc = RuleCombo::parse(right);
      const ComplexityScore ls = node_simplicity(apply_combo(g, lc));
      const ComplexityScore rs = node_simplicity(apply_combo(g, rc));
      out << to_string(compare_scores(ls, rs)) << "\n"
          << lc.display_name() << ": causes " << ls.cause_count << ", rules "
          << ls.rule_count << "\n"
          << rc.display_name() << ": causes " << rs.cause_count << ", rules "
          << rs.rule_count << "\n";
      return kExitOk;
    }

    if (*pages) {
      if (!fs::is_directory(scenarios_dir)) {
        throw Error("scenario directory not found: " + scenarios_dir);
      }
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(scenarios_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
          files.push_back(entry.path());
        }
      }
      std::sort(files.begin(), files.end());
      const TemplateSet templates = templates_from_env();
      std::vector<study::Scenario> scenarios;
      for (const auto& f : files) scenarios.push_back({load_trace(f.string()), templates});
      const auto& pairs = study::enumerate_pair_types();
      emit(study::export_pages(study::build_pages(scenarios, pairs)), out_path, out);
      return kExitOk;
    }

    if (*assign) {
      const auto refs = study::parse_pages(read_file(pages_path));
      emit(study::export_assignment(study::assign_pages(refs, participants, seed)),
           out_path, out);
      return kExitOk;
    }

    if (*analyze) {
      const auto refs = study::parse_pages(read_file(pages_path));
      const auto ratings = study::parse_ratings_csv(read_file(ratings_path));
      emit(study::analysis_csv(study::analyze(refs, ratings, alpha)), out_path, out);
      return kExitOk;
    }

    if (*serve_cmd) {
      ServiceConfig config{export_dir, ratings_path, std::nullopt};
      if (!pages_path.empty()) config.pages_path = pages_path;
      return serve(config, port, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << std::endl;
    return kExitDomainError;
  }
  return kExitUsage;
}

}  // namespace tracelens::cli
