#pragma once

#include <cstdint>
#include <string>

// Deterministic desk-scale stand-in datasets, written in the exact external
// file formats the loaders consume. Used by tests and by the acceptance
// suite when the real benchmark files are not available offline.

namespace invgae::synth {

// Citation-style single graph: hierarchical stochastic block model
// (classes split into sub-blocks) with class/block-correlated sparse binary
// bag-of-words features. Writes edges.txt, features.txt, labels.txt.
struct CitationSpec {
    int nodes = 1200;
    int classes = 6;
    int blocks_per_class = 10;
    int words_per_class = 12;
    int words_per_block = 3;
    int background_words = 32;
    double p_in_block = 0.35;
    double p_in_class = 0.0046;
    double p_out = 0.00058;
    double class_word_rate = 0.35;
    double block_word_rate = 0.40;
    double background_rate = 0.02;
    std::uint64_t seed = 99;

    int feature_dim() const {
        return classes * words_per_class + classes * blocks_per_class * words_per_block +
               background_words;
    }
};

void write_citation_dataset(const std::string& dir, const CitationSpec& spec);

// Molecule-style two-class TU dataset: class 0 graphs are a ring with a
// pendant chain, class 1 graphs are two triangles joined by a bridge; both
// get a few random pendant atoms. Node labels are degree-derived atom
// types. Writes NAME_A.txt, NAME_graph_indicator.txt, NAME_graph_labels.txt
// and NAME_node_labels.txt.
struct MoleculeSpec {
    int graphs = 150;
    std::uint64_t seed = 17;
};

void write_tu_dataset(const std::string& dir, const std::string& name, const MoleculeSpec& spec);

}  // namespace invgae::synth
