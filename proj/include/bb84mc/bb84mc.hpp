#pragma once

#include "bb84mc/ast.hpp"
#include "bb84mc/bb84.hpp"
#include "bb84mc/diagnostics.hpp"
#include "bb84mc/dtmc.hpp"
#include "bb84mc/oracle.hpp"
#include "bb84mc/parser.hpp"
#include "bb84mc/printer.hpp"
#include "bb84mc/property.hpp"
#include "bb84mc/solver.hpp"
#include "bb84mc/sweep.hpp"
#include "bb84mc/validate.hpp"
