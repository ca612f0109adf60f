/*
 * Copyright 2026 The cotrainlab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// cotrainlab: command-line front end over the C API.
//
//   cotrainlab --config FILE [--out DIR] [--seed-offset N] <command> [flags]
//
// Flags may also follow the command name.
//
// Exit status: 0 on success, 1 on any error, 2 when the audit finds a
// violated monotonicity claim.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "cotrain/cotrain.h"

namespace {

using Command = cotrain_status (*)(const char*, const char*, int64_t);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-view co-training experiments"};
  app.set_version_flag("--version", std::string(cotrain_version()));
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::int64_t seed_offset = 0;
  app.add_option("--config", config, "experiment TOML file")->required()->check(
      CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out,
                                 "output directory (default: output_dir from the config, "
                                 "else ./out)");
  app.add_option("--seed-offset", seed_offset, "added to every configured seed")
      ->capture_default_str();

  struct Entry {
    CLI::App* sub;
    Command run;
  };
  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };
  const Entry entries[] = {
      {sub("generate", "write a synthetic two-view dataset"), &cotrain_cmd_generate},
      {sub("cotrain", "run co-training over the configured seeds"), &cotrain_cmd_cotrain},
      {sub("figures", "tabulate the analytic curves"), &cotrain_cmd_figures},
      {sub("audit", "check monotonicity claims and one-step pseudo-label gains"),
       &cotrain_cmd_audit},
      {sub("sweep", "repeat co-training over one parameter"), &cotrain_cmd_sweep},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const char* out_dir = out_opt->count() > 0 ? out.c_str() : nullptr;
  for (const auto& entry : entries) {
    if (!entry.sub->parsed()) continue;
    const cotrain_status status = entry.run(config.c_str(), out_dir, seed_offset);
    if (status == COTRAIN_OK) return 0;
    std::fprintf(stderr, "cotrainlab %s: %s: %s\n", entry.sub->get_name().c_str(),
                 cotrain_status_name(status), cotrain_last_error());
    return status == COTRAIN_ERR_AUDIT_FAILED ? 2 : 1;
  }
  return 1;
}
