#include "tml2/cli.hpp"

#include "tml2/codegen.hpp"
#include "tml2/error.hpp"
#include "tml2/interpreter.hpp"
#include "tml2/parser.hpp"
#include "tml2/validator.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace tml2::cli {

namespace {

struct Loaded {
    std::optional<Model> model;
    int status = kOk;
};

void print_diagnostics(const std::vector<Diagnostic>& diagnostics, std::ostream& err) {
    for (const auto& d : diagnostics) err << format(d) << '\n';
}

// Reads, parses and validates `path`. Warnings are printed but do not fail.
Loaded load(const std::string& path, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "error[E-IO]: cannot read '" << path << "'\n";
        return {std::nullopt, kIo};
    }
    std::ostringstream text;
    text << in.rdbuf();
    auto parsed = parse(text.str(), path);
    if (!parsed.ok()) {
        print_diagnostics(parsed.diagnostics, err);
        return {std::nullopt, kInvalid};
    }
    const auto report = validate(*parsed.model);
    print_diagnostics(report.diagnostics, err);
    if (!report.ok) return {std::nullopt, kInvalid};
    return {std::move(parsed.model), kOk};
}

int cmd_check(const std::string& file, std::ostream& err) { return load(file, err).status; }

int cmd_fmt(const std::string& file, std::ostream& out, std::ostream& err) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        err << "error[E-IO]: cannot read '" << file << "'\n";
        return kIo;
    }
    std::ostringstream text;
    text << in.rdbuf();
    const auto parsed = parse(text.str(), file);
    if (!parsed.ok()) {
        print_diagnostics(parsed.diagnostics, err);
        return kInvalid;
    }
    out << pretty_print(*parsed.model);
    return kOk;
}

int cmd_sim(const std::string& file, const std::string& config, std::int64_t max_steps,
            const std::string& trace_path, std::ostream& out, std::ostream& err) {
    auto loaded = load(file, err);
    if (!loaded.model) return loaded.status;
    if (!loaded.model->find_configuration(config)) {
        err << "error: unknown configuration '" << config << "'\n";
        return kUsage;
    }
    const auto result = simulate(*loaded.model, config, max_steps);
    if (trace_path.empty()) {
        write_trace(out, result.trace);
    } else {
        std::ofstream trace(trace_path, std::ios::binary | std::ios::trunc);
        write_trace(trace, result.trace);
        if (!trace.flush()) {
            err << "error[E-IO]: cannot write trace to '" << trace_path << "'\n";
            return kIo;
        }
    }
    for (const auto& inst : result.instances) out << inst.name << ": " << inst.state << '\n';
    if (result.error) {
        err << "error[" << result.error->code() << "]: " << result.error->what() << '\n';
        return kRuntime;
    }
    return kOk;
}

int cmd_gen(const std::string& file, const std::string& config, const std::string& out_dir, std::ostream& err) {
    auto loaded = load(file, err);
    if (!loaded.model) return loaded.status;
    if (!loaded.model->find_configuration(config)) {
        err << "error: unknown configuration '" << config << "'\n";
        return kUsage;
    }
    try {
        codegen::write_artifacts(codegen::generate(*loaded.model, config), out_dir);
    } catch (const Error& e) {
        err << "error[" << e.code() << "]: " << e.what() << '\n';
        return e.code() == "E-IO" ? kIo : kInvalid;
    }
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Check, simulate, generate and format .tml2 models", "tml2c"};
    app.require_subcommand(1);

    std::string file;
    std::string config;
    std::string trace_path;
    std::string out_dir;
    std::int64_t max_steps = 0;

    auto* check = app.add_subcommand("check", "Parse and validate a model");
    check->add_option("FILE", file, "Model file")->required();

    auto* sim = app.add_subcommand("sim", "Simulate a configuration");
    sim->add_option("FILE", file, "Model file")->required();
    sim->add_option("--config", config, "Configuration to run")->required();
    sim->add_option("--max-steps", max_steps, "Upper bound on global steps")->required()->check(CLI::PositiveNumber);
    sim->add_option("--trace", trace_path, "Write the JSON-lines trace here instead of standard output");

    auto* gen = app.add_subcommand("gen", "Generate data-analytics scripts and manifest");
    gen->add_option("FILE", file, "Model file")->required();
    gen->add_option("--config", config, "Configuration to generate for")->required();
    gen->add_option("--out", out_dir, "Output directory")->required();

    auto* fmt = app.add_subcommand("fmt", "Print the canonical form of a model");
    fmt->add_option("FILE", file, "Model file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    try {
        if (check->parsed()) return cmd_check(file, err);
        if (fmt->parsed()) return cmd_fmt(file, out, err);
        if (sim->parsed()) return cmd_sim(file, config, max_steps, trace_path, out, err);
        return cmd_gen(file, config, out_dir, err);
    } catch (const Error& e) {
        err << "error[" << e.code() << "]: " << e.what() << '\n';
        return e.code() == "E-IO" ? kIo : kRuntime;
    }
}

}  // namespace tml2::cli
