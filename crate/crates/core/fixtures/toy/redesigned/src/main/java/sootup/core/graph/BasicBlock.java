package sootup.core.graph;

import java.util.List;
import sootup.core.jimple.common.stmt.Stmt;

/** Represents basic blocks that partition a method body. */
public class BasicBlock {
    private Stmt head;
    private Stmt tail;
    private List<BasicBlock> successors;

    /** Returns the first stmt in this block. */
    public Stmt getHead() {
        Stmt head = this.head;
        if (head == null) {
            throw new IllegalStateException("empty block");
        }
        return head;
    }

    /** Returns the blocks that may follow this block. */
    public List<BasicBlock> getSuccessors() {
        List<BasicBlock> succs = successors;
        if (succs == null) {
            throw new IllegalStateException("successors not computed");
        }
        return succs;
    }
}
