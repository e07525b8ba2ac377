#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace stalker {

enum class ExperimentKind { stalker, convergence, hitting, generator, opinion_game, stats };

const char* to_string(ExperimentKind kind);

// A fully resolved run description.  After parsing, params holds every key of
// the experiment's schema -- defaults filled in, derived values substituted --
// so dumping it reproduces the run exactly.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::stalker;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string output_dir = ".";
    std::map<std::string, std::string> params;

    double real(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    const std::string& str(const std::string& key) const;
    std::vector<std::int64_t> int_list(const std::string& key) const;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Parse a flat key=value config; `#` starts a comment.  Later sources win:
// file, then env overrides, then command-line overrides.  Unknown keys and
// bad values throw std::invalid_argument listing every offence at once.
ExperimentConfig parse_config(const std::string& text, const KeyValues& env = {},
                              const KeyValues& cli = {});

// Turn environment entries of the form STALKER_<KEY>=<value> into override
// pairs (key lowercased); entries without the prefix are ignored.
KeyValues env_overrides(const std::vector<std::string>& environ_entries);

// Canonical text form of a resolved config; run_experiment writes this as
// manifest.txt next to the result files.
std::string manifest_text(const ExperimentConfig& config);

// Execute the experiment and write manifest.txt plus the result CSVs into
// output_dir (created if needed).  Returns the paths written.  Identical
// config and seed produce byte-identical CSVs for any thread count.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

}  // namespace stalker
