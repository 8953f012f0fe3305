package sootup.core.model;

import java.util.List;
import java.util.stream.Collectors;

/**
 * Class that models the body (code attached) of a method. A body holds
 * locals, a statement graph and positions.
 */
public class Body {
    private final StmtGraph<?> graph;
    private final Set<Local> locals;

    /**
     * Returns the stmts of this body.
     *
     * @return a list of stmts
     */
    public List<Stmt> getStmts() {
        // the graph is immutable, callers get a copy
        List<Stmt> stmts = graph.getStmts();
        return stmts;
    }

    /**
     * Returns the values used in this body.
     */
    public List<Value> getUses() {
        // collect uses of every stmt
        return graph.getNodes().stream()
            .flatMap(item -> item.getUses().stream())
            .collect(Collectors.toList());
    }

    /**
     * Returns the values defined in this body.
     */
    public List<Value> getDefs() {
        // collect definitions of every stmt
        return graph.getNodes().stream()
            .flatMap(item -> item.getDef().stream())
            .collect(Collectors.toList());
    }

    /**
     * Verifies that each Local of getUsesAndDefs() is in this body's locals.
     */
    public void validateLocals() {
        for (Value value : getUses()) {
            validateLocal(value);
        }
        for (Value value : getDefs()) {
            validateLocal(value);
        }
    }

    private void validateLocal(Value value) {
        if (value instanceof Local && !locals.contains(value)) {
            throw new IllegalStateException("Local not in set : " + value);
        }
    }
}
