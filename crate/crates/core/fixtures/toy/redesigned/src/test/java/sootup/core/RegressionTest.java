package sootup.core;

import static org.junit.jupiter.api.Assertions.assertEquals;

import org.junit.jupiter.api.Test;

public class RegressionTest {

    /** Checks that a fresh body has an empty stmt graph. */
    @Test
    public void testStmtGraph() {
        Body body = Body.builder().build();
        List<Stmt> stmts = body.getStmts();
        // nothing was inserted yet
        assertEquals(0, stmts.size());
    }

    /** Checks that an empty view has no classes. */
    @Test
    public void testEmptyView() {
        View view = new View();
        Collection<SootClass> classes = view.getClasses();
        assertEquals(0, classes.size());
    }
}
