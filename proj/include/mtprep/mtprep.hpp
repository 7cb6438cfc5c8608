#pragma once

// Umbrella header for the MT preprocessing toolkit: parallel-corpus I/O,
// cleaning, pretokenization, truecasing, subword models (BPE and unigram LM
// with byte fallback) and reproducible BLEU evaluation.

#include "mtprep/bleu.hpp"
#include "mtprep/bpe.hpp"
#include "mtprep/cleaning.hpp"
#include "mtprep/corpus.hpp"
#include "mtprep/pretokenize.hpp"
#include "mtprep/subword_model.hpp"
#include "mtprep/truecase.hpp"
#include "mtprep/unigram.hpp"
#include "mtprep/version.hpp"
