#pragma once

#include "msg/config.hpp"

namespace msg {

// Pipeline subcommands. Each one works under config.output.dir, prints a
// one-line summary on success, and records the outcome in <out>/run.json
// (written for failures past config parsing too). Returns a process exit
// code.
int cmd_gen_data(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_sample(const RunConfig& config);
int cmd_transfer(const RunConfig& config);
int cmd_ablate(const RunConfig& config);
int cmd_eval(const RunConfig& config);

}  // namespace msg
