#pragma once

#include <CLI11.hpp>

namespace cli {

// Each registers one subcommand on the app; the callback runs when it is
// chosen. Library exceptions propagate to main's exit-code mapping.
void register_synth(CLI::App& app);
void register_fit_gray(CLI::App& app);
void register_pseudo(CLI::App& app);
void register_colorize(CLI::App& app);
void register_render(CLI::App& app);
void register_eval(CLI::App& app);
void register_act_export(CLI::App& app);

}  // namespace cli
