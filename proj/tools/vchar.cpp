// Copyright 2026 The vchar Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver.
//
//   vchar run <plan.yaml>
//   vchar report <archive-glob>... [--th-safe baseline|<value>] [--out <dir>]
//   vchar replay <archive> <index>
//   vchar bridge-echo [--port <p>] [--table <file>]
//
// Exit codes: 0 success, 1 usage error, 2 plan or semantic error,
// 3 backend failure.

#include <glob.h>

#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vchar/report.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kSemantic = 2, kBackend = 3 };

std::vector<std::filesystem::path> expand(const std::vector<std::string>& patterns) {
  std::vector<std::filesystem::path> out;
  for (const auto& p : patterns) {
    glob_t g{};
    const int rc = ::glob(p.c_str(), 0, nullptr, &g);
    if (rc == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    }
    ::globfree(&g);
    if (rc == GLOB_NOMATCH) throw vchar::InputError("no archive matches '" + p + "'");
  }
  return out;
}

volatile std::sig_atomic_t g_stop = 0;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search for vehicle characteristic settings that degrade driving safety"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed_offset = 0;
  std::size_t parallel = 1;
  std::string backend;
  app.add_option("--seed-offset", seed_offset, "Added to every plan seed");
  app.add_option("--parallel", parallel, "Concurrent evaluations per generation")->check(CLI::PositiveNumber);
  app.add_option("--backend", backend, "internal, or an endpoint such as tcp://127.0.0.1:7000");

  auto* run = app.add_subcommand("run", "Execute an experiment plan");
  std::string plan_path;
  run->add_option("plan", plan_path, "Plan file")->required();

  auto* rep = app.add_subcommand("report", "Analyse completed archives");
  std::vector<std::string> patterns;
  std::string th_safe = "baseline";
  std::string out_dir;
  std::string scope = "all_evaluations";
  bool no_verify = false;
  rep->add_option("archives", patterns, "Archive files or glob patterns")->required();
  rep->add_option("--th-safe", th_safe, "Unsafe threshold: 'baseline' or a number");
  rep->add_option("--out", out_dir, "Output directory (default: <archive dir>/report)");
  rep->add_option("--scope", scope, "Unsafe candidates: all_evaluations or final_front");
  rep->add_flag("--no-verify", no_verify, "Skip manifest hash verification");

  auto* rpl = app.add_subcommand("replay", "Re-evaluate one archived record");
  std::string archive_path;
  std::size_t index = 0;
  rpl->add_option("archive", archive_path, "Archive file")->required();
  rpl->add_option("index", index, "Evaluation index")->required();

  auto* echo = app.add_subcommand("bridge-echo", "Serve the bridge protocol with the internal simulator");
  std::uint16_t port = 0;
  std::string table_path = std::string(VCHAR_SOURCE_DIR) + "/data/tables/carla.yaml";
  echo->add_option("--port", port, "TCP port (0 picks one)");
  echo->add_option("--table", table_path, "Characteristic table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    std::optional<vchar::BackendSpec> backend_spec;
    if (!backend.empty()) backend_spec = vchar::parse_backend_string(backend);

    if (*run) {
      const auto plan = vchar::parse_plan(plan_path);
      vchar::RunnerOptions opts;
      opts.parallel = parallel;
      opts.seed_offset = seed_offset;
      opts.backend = backend_spec;
      opts.log = &std::cerr;
      const auto result = vchar::run_plan(plan, opts);
      std::cout << result.manifest.string() << '\n';
      return result.all_ok() ? kOk : kBackend;
    }
    if (*rep) {
      vchar::ReportOptions opts;
      if (th_safe != "baseline") {
        try {
          std::size_t used = 0;
          opts.th_safe = std::stod(th_safe, &used);
          if (used != th_safe.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          std::cerr << "error: --th-safe expects 'baseline' or a number\n";
          return kUsage;
        }
      }
      opts.scope = vchar::parse_unsafe_scope(scope);
      opts.verify_manifest = !no_verify;
      const auto files = expand(patterns);
      const auto bundle = vchar::report(files, opts);
      std::filesystem::path dir = out_dir;
      if (dir.empty()) dir = std::filesystem::path(files.front()).parent_path() / "report";
      bundle.write(dir);
      std::cout << (dir / "summary.json").string() << '\n';
      return kOk;
    }
    if (*rpl) {
      const auto r = vchar::replay_record(archive_path, index, backend_spec);
      const vchar::json out{{"index", index},
                            {"match", r.match},
                            {"stored", vchar::to_json(r.stored, index)},
                            {"replayed", vchar::to_json(r.fresh, index)}};
      std::cout << out.dump(2) << '\n';
      return r.match ? kOk : kBackend;
    }
    if (*echo) {
      vchar::BridgeServer server(vchar::internal_bridge_handler(vchar::load_table(table_path)), port);
      std::cout << server.endpoint().to_string() << std::endl;
      std::signal(SIGINT, [](int) { g_stop = 1; });
      std::signal(SIGTERM, [](int) { g_stop = 1; });
      server.start();
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
      return kOk;
    }
  } catch (const vchar::EvaluationError& e) {
    std::cerr << "backend failure: " << e.what() << '\n';
    return kBackend;
  } catch (const vchar::RunAborted& e) {
    std::cerr << "backend failure: " << e.what() << '\n';
    return kBackend;
  } catch (const vchar::TransportError& e) {
    std::cerr << "backend failure: " << e.what() << '\n';
    return kBackend;
  } catch (const vchar::ProtocolError& e) {
    std::cerr << "error: " << e.what() << " (field " << e.field() << ")\n";
    return kSemantic;
  } catch (const vchar::SimulationError& e) {
    std::cerr << "backend failure: " << e.what() << '\n';
    return kBackend;
  } catch (const vchar::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSemantic;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSemantic;
  }
  return kUsage;
}
