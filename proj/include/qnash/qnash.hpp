#pragma once

#include "qnash/config.hpp"
#include "qnash/errors.hpp"
#include "qnash/tensor.hpp"
#include "qnash/classical.hpp"
#include "qnash/quantum.hpp"
#include "qnash/geometry.hpp"
#include "qnash/applications.hpp"
#include "qnash/io.hpp"
