#pragma once

#include <stdexcept>

#include "config.hpp"

namespace ffgap::cli {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int cmd_gap(const RunConfig& cfg);
int cmd_dl_check(const RunConfig& cfg);
int cmd_certify(const RunConfig& cfg);
int cmd_scaling(const RunConfig& cfg);
int cmd_coloring(const RunConfig& cfg);
int cmd_validate(const RunConfig& cfg);

}  // namespace ffgap::cli
