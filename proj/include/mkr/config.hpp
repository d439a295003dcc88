#pragma once

#include <string>
#include <vector>

#include "mkr/experiments.hpp"

namespace mkr {

/// Flat sectioned key = value document ('#' comments, line numbers kept for
/// error reporting).
struct ConfigFile {
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };
    struct Section {
        std::string name;
        int line = 0;
        std::vector<Entry> entries;
    };
    std::vector<Section> sections;

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_text(const std::string& text);

    const Section* find(const std::string& name) const;
};

/// Declarative experiment description: task (or CSV data), estimators,
/// solver/refinement settings, output directory.
struct ExperimentConfig {
    SyntheticTask task = SyntheticTask::default_task();
    std::string data_csv;  // when set, overrides the synthetic task for `fit`
    int folds = 5;
    std::string out_dir = "out";
    std::vector<EstimatorSpec> estimators;
    std::vector<std::string> estimator_names;
};

/// Typed load; throws InvalidConfig with a line-anchored message
/// ("line N: [section] key: problem") on any violation.
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace mkr
