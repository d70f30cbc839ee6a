#pragma once

#include "gaussep/errors.hpp"
#include "gaussep/matlin.hpp"
#include "gaussep/gaussian.hpp"
#include "gaussep/engine.hpp"
#include "gaussep/certify.hpp"
#include "gaussep/ppt.hpp"
