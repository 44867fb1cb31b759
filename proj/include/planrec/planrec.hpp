#pragma once

#include "planrec/error.hpp"
#include "planrec/fluent_set.hpp"
#include "planrec/model.hpp"
#include "planrec/pddl/ast.hpp"
#include "planrec/pddl/parser.hpp"
#include "planrec/pddl/printer.hpp"
#include "planrec/pddl/grounder.hpp"
#include "planrec/planner.hpp"
#include "planrec/observations.hpp"
#include "planrec/posterior.hpp"
#include "planrec/recognizer.hpp"
#include "planrec/nbm.hpp"
#include "planrec/hybrid.hpp"
#include "planrec/sampler.hpp"
#include "planrec/benchkit/buc.hpp"
#include "planrec/benchkit/logistics.hpp"
#include "planrec/benchkit/dataset.hpp"
#include "planrec/benchkit/metrics.hpp"
#include "planrec/benchkit/experiment.hpp"
