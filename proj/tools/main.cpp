#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"
#include "splatcolor/errors.hpp"

// Exit codes: 0 success, 2 input/schema/config error, 3 numerical divergence,
// 1 anything else. Scripts depend on these staying put.
int main(int argc, char** argv) {
    CLI::App app{"2D gaussian splat colorization pipeline"};
    app.require_subcommand(1);

    cli::register_synth(app);
    cli::register_fit_gray(app);
    cli::register_pseudo(app);
    cli::register_colorize(app);
    cli::register_render(app);
    cli::register_eval(app);
    cli::register_act_export(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message
        return 2;
    } catch (const splatcolor::DivergenceError& e) {
        std::fprintf(stderr, "error: diverged at iteration %d (view %s): %s\n", e.iteration,
                     e.view_id.c_str(), e.what());
        return 3;
    } catch (const splatcolor::SchemaError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const splatcolor::DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const splatcolor::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const splatcolor::InvalidInputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
