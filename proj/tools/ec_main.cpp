// ec: command line front end for solving, chatting, benchmarking, parsing
// and serving the HTTP API.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ec/dsl.hpp"
#include "ec/gateway/api.hpp"
#include "ec/gateway/config.hpp"
#include "ec/gateway/http_server.hpp"
#include "ec/metrics.hpp"
#include "ec/pipeline.hpp"
#include "ec/problems.hpp"
#include "ec/scripted_adapter.hpp"

namespace {

using namespace ec;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("FileNotFound", "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

problems::ProblemKind kind_arg(const std::string& s) {
  auto k = problems::parse_kind(s);
  if (!k) throw Error("UnknownKind", "unknown problem kind '" + s + "'");
  return *k;
}

struct PipelineFlags {
  std::size_t samples = 5;
  std::size_t max_debug = 5;
  long timeout_ms = 60000;
  std::string prompts_dir;

  void add(CLI::App* app) {
    app->add_option("--samples", samples, "Formulation candidates per solve (1-8)");
    app->add_option("--max-debug", max_debug, "Repair rounds per candidate");
    app->add_option("--timeout-ms", timeout_ms, "Adapter timeout in milliseconds (0 waits forever)");
    app->add_option("--prompts-dir", prompts_dir, "Directory with <role>.txt prompt overrides");
  }
  pipeline::PipelineConfig config() const {
    pipeline::PipelineConfig cfg;
    cfg.samples = samples;
    cfg.max_debug = max_debug;
    cfg.adapter_timeout = std::chrono::milliseconds(timeout_ms);
    if (!prompts_dir.empty()) cfg.prompts = pipeline::PromptSet::with_overrides(prompts_dir);
    cfg.check();
    return cfg;
  }
};

int cmd_solve(const std::string& kind, const std::string& params_path, bool json) {
  const auto p = problems::params_from_json(kind_arg(kind), nlohmann::json::parse(read_file(params_path)),
                                            std::filesystem::path(params_path).parent_path());
  const auto out = pipeline::direct_solve_json(p);
  if (json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << out.at("explanation").get<std::string>();
  }
  return 0;
}

int cmd_chat(const std::string& script_path, const PipelineFlags& flags, bool json) {
  auto adapter = pipeline::ScriptedAdapter::from_file(script_path);
  const auto cfg = flags.config();
  auto session = pipeline::new_session("chat");
  const auto turns = adapter.user_turns();
  if (turns.empty()) throw Error("BadScript", "script has no \"user\" turns to replay");
  for (const auto& t : turns) {
    const auto reply = pipeline::respond(session, t, adapter, cfg);
    if (!json) std::cout << "user> " << t << "\nconcierge> " << reply << "\n\n";
  }
  if (json) std::cout << pipeline::to_json(session, true).dump(2) << "\n";
  else std::cout << "[phase: " << pipeline::to_string(session.phase) << "]\n";
  return 0;
}

int cmd_bench(const std::string& kinds, std::size_t n, const std::string& script, const std::string& out,
              std::uint64_t seed, std::size_t threads, const PipelineFlags& flags) {
  metrics::BenchmarkConfig cfg;
  std::stringstream ss(kinds);
  for (std::string k; std::getline(ss, k, ',');)
    if (!k.empty() && k != "all") cfg.kinds.push_back(kind_arg(k));
  cfg.n_per_kind = n;
  cfg.script = script;
  cfg.seed = seed;
  cfg.threads = threads;
  cfg.pipeline = flags.config();
  const auto result = metrics::run_benchmark(cfg);
  metrics::write_benchmark(result, out);
  std::cout << metrics::summary_csv(result.summary);
  std::cout << metrics::estimates_json(result).dump() << "\n";
  return 0;
}

int cmd_parse(const std::string& path, bool syntax_only) {
  const auto text = read_file(path);
  try {
    const auto body = text.find("```") != std::string::npos ? dsl::extract_block(text) : text;
    const auto doc = dsl::parse(body);
    std::cout << dsl::print(doc);
    if (!syntax_only) {
      const auto inst = dsl::compile(doc);
      std::size_t elements = 0;
      for (const auto& v : inst.variables) elements += v.length;
      std::cout << "# compiled: " << inst.variables.size() << " variables (" << elements << " elements), "
                << inst.objective.size() << " objective terms, " << inst.constraints.size() << " constraints\n";
    }
    return 0;
  } catch (const dsl::DslError& e) {
    std::cerr << path << ":" << e.span().line << ":" << e.span().column << ": " << dsl::to_string(e.category())
              << " " << dsl::to_string(e.error_code()) << ": " << e.what() << "\n";
    return 2;
  }
}

gateway::HttpServer* g_server = nullptr;

int cmd_serve(const std::string& config_file, const std::map<std::string, std::string>& flags) {
  std::optional<std::filesystem::path> file;
  if (!config_file.empty()) file = config_file;
  const auto cfg = gateway::resolve_config(file, gateway::process_environment(), flags);
  gateway::Api api(cfg, gateway::make_adapter(cfg));
  gateway::HttpServer server(api);
  const int port = server.bind(cfg.host, cfg.port);
  std::cout << "listening on http://" << cfg.host << ":" << port << " (adapter: " << cfg.adapter << ")" << std::endl;
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  server.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy concierge: household energy decisions as convex optimization"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "Solve a problem from a parameter file without a model");
  std::string solve_kind, solve_params;
  bool solve_json = false;
  solve->add_option("kind", solve_kind, "Problem kind (ev_charging, hvac, battery_dispatch, ...)")->required();
  solve->add_option("--params", solve_params, "JSON parameter file")->required();
  solve->add_flag("--json", solve_json, "Print the full JSON result");

  auto* chat = app.add_subcommand("chat", "Replay a scripted conversation");
  std::string chat_script;
  bool chat_json = false;
  PipelineFlags chat_flags;
  chat->add_option("--script", chat_script, "Script with user turns and model replies")->required();
  chat->add_flag("--json", chat_json, "Print the final session as JSON");
  chat_flags.add(chat);

  auto* bench = app.add_subcommand("bench", "Run scripted episodes and write summary.csv");
  std::string bench_kinds = "all", bench_script, bench_out = "bench_out";
  std::size_t bench_n = 20, bench_threads = 0;
  std::uint64_t bench_seed = 1;
  PipelineFlags bench_flags;
  bench->add_option("--kinds", bench_kinds, "Comma separated kinds or 'all'");
  bench->add_option("--n", bench_n, "Episodes per kind");
  bench->add_option("--script", bench_script, "Scripted adapter file")->required();
  bench->add_option("--out", bench_out, "Output directory");
  bench->add_option("--seed", bench_seed, "Parameter seed");
  bench->add_option("--threads", bench_threads, "Worker threads (0 = hardware)");
  bench_flags.add(bench);

  auto* parse = app.add_subcommand("parse", "Parse and compile an ecdsl document");
  std::string parse_file;
  bool syntax_only = false;
  parse->add_option("file", parse_file, "Document (fenced or plain)")->required();
  parse->add_flag("--syntax-only", syntax_only, "Stop after parsing");

  auto* serve = app.add_subcommand("serve", "Run the HTTP gateway");
  std::string serve_config;
  std::map<std::string, std::string> serve_flags;
  serve->add_option("--config", serve_config, "key = value config file");
  for (const char* key : ec::gateway::kConfigKeys) {
    std::string flag = std::string("--") + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    serve->add_option_function<std::string>(flag, [&serve_flags, key](const std::string& v) { serve_flags[key] = v; },
                                            std::string("Override ") + key);
  }

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(solve_kind, solve_params, solve_json);
    if (*chat) return cmd_chat(chat_script, chat_flags, chat_json);
    if (*bench) return cmd_bench(bench_kinds, bench_n, bench_script, bench_out, bench_seed, bench_threads, bench_flags);
    if (*parse) return cmd_parse(parse_file, syntax_only);
    if (*serve) return cmd_serve(serve_config, serve_flags);
  } catch (const ec::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: InternalError: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
