#pragma once

#include "nureach/criterion.hpp"
#include "nureach/document.hpp"
#include "nureach/errors.hpp"
#include "nureach/experiments.hpp"
#include "nureach/numerics.hpp"
#include "nureach/oracle.hpp"
#include "nureach/report.hpp"
#include "nureach/scheduler.hpp"
#include "nureach/system_model.hpp"
