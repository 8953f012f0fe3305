package sootup.core.transform;

import sootup.core.model.Body;
import sootup.core.views.View;

/** A class which acts on a Body. Interceptors transform a Body while it is being built. */
public class BodyInterceptor {

    /** Called by the body builder. Acts as the hook where a BodyInterceptor transforms a Body. */
    public void interceptBody(Body.BodyBuilder builder, View view) {
        if (builder == null) {
            return;
        }
        // run the interceptor on the body
        builder.getStmtGraph().validateStmtConnectionsInGraph();
    }
}
