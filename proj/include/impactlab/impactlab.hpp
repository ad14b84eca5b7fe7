#pragma once

// Umbrella header for the impactlab library.

#include "impactlab/ast.hpp"
#include "impactlab/callgraph.hpp"
#include "impactlab/checker.hpp"
#include "impactlab/corpus.hpp"
#include "impactlab/diagnostics.hpp"
#include "impactlab/impact.hpp"
#include "impactlab/interpreter.hpp"
#include "impactlab/lexer.hpp"
#include "impactlab/mutation.hpp"
#include "impactlab/parser.hpp"
#include "impactlab/pipeline.hpp"
#include "impactlab/printer.hpp"
#include "impactlab/refs.hpp"
