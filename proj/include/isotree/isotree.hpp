#pragma once

#include "isotree/affinity.hpp"
#include "isotree/core.hpp"
#include "isotree/evaluation.hpp"
#include "isotree/io.hpp"
#include "isotree/oracle.hpp"
#include "isotree/outlier.hpp"
#include "isotree/pipeline.hpp"
#include "isotree/postprocess.hpp"
#include "isotree/solver.hpp"
#include "isotree/spanning_tree.hpp"
