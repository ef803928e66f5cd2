#pragma once

#include "retroscope/error.hpp"
#include "retroscope/linalg.hpp"
#include "retroscope/measurement.hpp"
#include "retroscope/interferometer.hpp"
#include "retroscope/discrimination.hpp"
#include "retroscope/optimizer.hpp"
#include "retroscope/dsl.hpp"
#include "retroscope/sweep.hpp"
