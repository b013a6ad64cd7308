#pragma once

#include "revca/amoroso.hpp"
#include "revca/injectivity.hpp"
#include "revca/oracle.hpp"
#include "revca/rule.hpp"
#include "revca/surjectivity.hpp"
#include "revca/survey.hpp"
#include "revca/tuple_set.hpp"
#include "revca/verdict.hpp"
