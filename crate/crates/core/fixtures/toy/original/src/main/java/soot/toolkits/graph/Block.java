package soot.toolkits.graph;

import java.util.List;
import soot.Unit;

/** Represents BasicBlocks that partition a method body. */
public class Block {
    private Unit mHead;
    private Unit mTail;
    private List<Block> mSuccessors;

    /** Returns the first unit in this block. */
    public Unit getHead() {
        Unit head = mHead;
        if (head == null) {
            throw new IllegalStateException("empty block");
        }
        return head;
    }

    /** Returns the blocks that may follow this block. */
    public List<Block> getSuccs() {
        List<Block> succs = mSuccessors;
        if (succs == null) {
            throw new IllegalStateException("successors not computed");
        }
        return succs;
    }
}
