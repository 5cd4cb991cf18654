#pragma once

#include "equilib/conformal.hpp"
#include "equilib/field.hpp"
#include "equilib/geometry.hpp"
#include "equilib/io.hpp"
#include "equilib/numerics.hpp"
#include "equilib/oracle.hpp"
#include "equilib/params.hpp"
#include "equilib/render.hpp"
#include "equilib/types.hpp"
