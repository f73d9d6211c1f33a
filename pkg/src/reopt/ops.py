"""The patch-operation vocabulary.

Thirteen operations: indexed data edits, pattern-based batch edits over
flat variable/row keys, and structural family edits.
"""

PATCH_OPS = (
    "UPDATE_PARAMETER",
    "UPDATE_BOUND",
    "UPDATE_CONSTRAINT_RHS",
    "UPDATE_CONSTRAINT_LHS",
    "UPDATE_OBJECTIVE_COEFF",
    "UPDATE_OBJECTIVE_WEIGHT",
    "UPDATE_COEFFICIENT",
    "FIX_VARIABLES_BY_PATTERN",
    "UPDATE_CONSTRAINT_RHS_BY_PATTERN",
    "ADD_VARIABLE_FAMILY",
    "ADD_CONSTRAINT_FAMILY",
    "REMOVE_CONSTRAINT_FAMILY",
    "ADD_OBJECTIVE_COMPONENT",
)

OP_EFFECTS = {
    "UPDATE_PARAMETER": "Replace or additively update a named parameter entry, optionally at a keyed index.",
    "UPDATE_BOUND": "Set the lower or upper bound of an existing variable-family member.",
    "UPDATE_CONSTRAINT_RHS": "Replace or additively update the right-hand side of an existing constraint-family row.",
    "UPDATE_CONSTRAINT_LHS": "Replace the left-hand-side specification for an existing constraint family.",
    "UPDATE_OBJECTIVE_COEFF": "Replace or additively update an indexed coefficient inside an objective component.",
    "UPDATE_OBJECTIVE_WEIGHT": "Replace or additively update the weight of a named objective component.",
    "UPDATE_COEFFICIENT": "Modify nonzero matrix coefficients selected by variable and constraint-name patterns.",
    "FIX_VARIABLES_BY_PATTERN": "Set lower and upper bounds for variables selected by a name pattern.",
    "UPDATE_CONSTRAINT_RHS_BY_PATTERN": "Set or scale right-hand sides for rows selected by a constraint-name pattern.",
    "ADD_VARIABLE_FAMILY": "Add a new decision-variable family.",
    "ADD_CONSTRAINT_FAMILY": "Add a new constraint family.",
    "REMOVE_CONSTRAINT_FAMILY": "Remove an existing constraint family.",
    "ADD_OBJECTIVE_COMPONENT": "Add a new objective component.",
}

# ops that mutate model structure rather than data; used to classify edit scope
STRUCTURAL_OPS = frozenset({
    "UPDATE_CONSTRAINT_LHS",
    "ADD_VARIABLE_FAMILY",
    "ADD_CONSTRAINT_FAMILY",
    "REMOVE_CONSTRAINT_FAMILY",
    "ADD_OBJECTIVE_COMPONENT",
})
