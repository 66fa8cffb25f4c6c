// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

// Fixture generator: the n-attribute cancellation model and seeded random
// models, written in the native JSON format.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "abex/model_io.hpp"
#include "abex/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"generate models in the native JSON format"};
    app.name("genmodel");
    app.require_subcommand(1);

    std::string out_path;
    std::int32_t n = 3;
    CLI::App* disc = app.add_subcommand("discrepancy",
                                        "cancellation model whose tree-specific explanation "
                                        "keeps everything while the empty term suffices");
    disc->add_option("--n", n, "number of Boolean attributes")->required();
    disc->add_option("--out", out_path, "output path (default: stdout)");

    abex::RandomModelConfig rcfg;
    std::uint64_t seed = 0;
    CLI::App* rnd = app.add_subcommand("random", "seeded random model");
    rnd->add_option("--seed", seed, "seed");
    rnd->add_option("--numerical", rcfg.numerical, "numerical attributes");
    rnd->add_option("--categorical", rcfg.categorical, "categorical attributes");
    rnd->add_option("--boolean", rcfg.boolean, "Boolean attributes");
    rnd->add_option("--classes", rcfg.classes, "classes (1 = binary)");
    rnd->add_option("--trees", rcfg.trees_per_class, "trees per class");
    rnd->add_option("--depth", rcfg.max_depth, "maximum depth");
    rnd->add_option("--out", out_path, "output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        abex::BoostedTree bt = disc->parsed() ? abex::gen_discrepancy_model(n)
                                              : abex::random_model(rcfg, seed);
        std::string json = abex::serialize_native_model(bt);
        if (out_path.empty())
            std::cout << json << "\n";
        else
            abex::write_file(out_path, json);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
