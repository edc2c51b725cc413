#pragma once

#include "spmk/bench.hpp"
#include "spmk/corpus.hpp"
#include "spmk/csr.hpp"
#include "spmk/error.hpp"
#include "spmk/io.hpp"
#include "spmk/kernels.hpp"
#include "spmk/reduction.hpp"
#include "spmk/rmat.hpp"
#include "spmk/selector.hpp"
